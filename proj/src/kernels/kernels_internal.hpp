#pragma once

#include "signcop/kernels.hpp"

namespace signcop::kernels::detail {

const KernelTable& scalar_table();
#if defined(SIGNCOP_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace signcop::kernels::detail
