#pragma once

#include "qilab/error.hpp"

#include <doctest.h>

// Asserts that `expr` throws qilab::Error carrying `expected`.
#define CHECK_CODE(expr, expected)                                  \
  do {                                                              \
    bool thrown_ = false;                                           \
    try {                                                           \
      (void)(expr);                                                 \
    } catch (const qilab::Error& e_) {                              \
      thrown_ = true;                                               \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());            \
    }                                                               \
    CHECK_MESSAGE(thrown_, "expected an error from " #expr);        \
  } while (0)
