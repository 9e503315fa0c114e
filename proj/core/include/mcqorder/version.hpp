// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace mcqorder {

inline constexpr const char kVersion[] = "0.1.0";

}  // namespace mcqorder
