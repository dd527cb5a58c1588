#pragma once

#include <functional>
#include <optional>

#include "martensim/errors.hpp"

// Runs fn and reports which error kind it raised, if any; keeps the checks on
// error paths readable without repeating try/catch blocks.
inline std::optional<marten::ErrorKind> error_kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const marten::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
