#include <cstdlib>
#include <cstring>

#include "hfl/kernels.hpp"

namespace hfl::kern {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& scalar_table() {
    static const KernelTable t{"scalar",       scalar::axpy,     scalar::lincomb,
                               scalar::rk4_update, scalar::dot,  scalar::sum,
                               scalar::stencil4,   scalar::cmul_real, scalar::cmul_ik};
    return t;
}

const KernelTable& avx2_table() {
    static const KernelTable t{"avx2",       avx2::axpy,     avx2::lincomb,
                               avx2::rk4_update, avx2::dot,  avx2::sum,
                               avx2::stencil4,   avx2::cmul_real, avx2::cmul_ik};
    return t;
}

const KernelTable& active() {
    static const KernelTable* chosen = [] {
        const char* force = std::getenv("HFL_FORCE_SCALAR");
        if (force && std::strcmp(force, "0") != 0) return &scalar_table();
        return cpu_has_avx2() ? &avx2_table() : &scalar_table();
    }();
    return *chosen;
}

}  // namespace hfl::kern
