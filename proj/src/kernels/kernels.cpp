#include "carbospec/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace carbospec {
namespace {

const Kernels* gActive = nullptr;

const Kernels* resolve(const char* backend) {
    if (backend != nullptr && std::strcmp(backend, "scalar") == 0) {
        return &scalarKernels();
    }
    if (backend != nullptr && std::strcmp(backend, "avx2") == 0) {
        const Kernels* avx2 = avx2KernelsOrNull();
        if (avx2 == nullptr) {
            throw std::runtime_error("avx2 kernels requested but unavailable on this CPU/build");
        }
        return avx2;
    }
    if (backend != nullptr && std::strcmp(backend, "auto") != 0) {
        throw std::runtime_error(std::string("unknown kernel backend: ") + backend);
    }
    const Kernels* avx2 = avx2KernelsOrNull();
    return avx2 != nullptr ? avx2 : &scalarKernels();
}

} // namespace

const Kernels& kernels() {
    if (gActive == nullptr) {
        gActive = resolve(std::getenv("CARBOSPEC_KERNELS"));
    }
    return *gActive;
}

void forceKernelBackend(const char* backend) { gActive = resolve(backend); }

} // namespace carbospec
