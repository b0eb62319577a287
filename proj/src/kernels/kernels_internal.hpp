// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "xlproject/kernels.hpp"

namespace xlproject::kernels::detail {

// Defined in kernels_avx2.cpp / kernels_neon.cpp when those variants are
// compiled. Returning nullptr means "not built for this target".
const KernelTable* avx2_table_if_built();
const KernelTable* neon_table_if_built();

}  // namespace xlproject::kernels::detail
