#pragma once

#include <gtest/gtest.h>

#include "posefuse/error.hpp"

// Asserts that `stmt` throws posefuse::Error carrying `expected`.
#define EXPECT_POSEFUSE_ERROR(stmt, expected)                                          \
  do {                                                                                 \
    try {                                                                              \
      stmt;                                                                            \
      ADD_FAILURE() << "no exception from " #stmt;                                     \
    } catch (const ::posefuse::Error& e) {                                             \
      EXPECT_EQ(e.code(), expected) << e.what();                                       \
    }                                                                                  \
  } while (0)
