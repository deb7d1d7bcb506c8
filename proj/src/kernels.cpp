#include "irlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace irlab::kernels {

const Ops& active() {
    static const Ops* chosen = [] {
        if (const char* env = std::getenv("IRLAB_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
            if (std::strcmp(env, "avx2") == 0 && avx2_available()) return &avx2_ops();
        }
        return avx2_available() ? &avx2_ops() : &scalar_ops();
    }();
    return *chosen;
}

}  // namespace irlab::kernels
