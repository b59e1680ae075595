#include <atomic>
#include <cstdlib>
#include <string>

#include "cayley/error.hpp"
#include "cayley/kernels.hpp"

namespace cayley::kernels {

namespace {

constexpr KernelTable kScalarTable{scalar::axpy, scalar::dotu, scalar::dotc, scalar::norm_sq};

#if defined(CAYLEY_HAVE_AVX2)
constexpr KernelTable kAvx2Table{avx2::axpy, avx2::dotu, avx2::dotc, avx2::norm_sq};
#endif

bool cpu_has_avx2() noexcept {
#if defined(CAYLEY_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() noexcept {
    if (const char *env = std::getenv("CAYLEY_KERNELS")) {
        std::string want(env);
        if (want == "scalar") {
            return Backend::scalar;
        }
        if (want == "avx2" && cpu_has_avx2()) {
            return Backend::avx2;
        }
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

const KernelTable *table_ptr(Backend backend) noexcept {
    switch (backend) {
#if defined(CAYLEY_HAVE_AVX2)
        case Backend::avx2:
            return cpu_has_avx2() ? &kAvx2Table : nullptr;
#endif
        case Backend::scalar:
            return &kScalarTable;
        default:
            return nullptr;
    }
}

struct State {
    std::atomic<Backend> backend;
    std::atomic<const KernelTable *> table;

    State() : backend(initial_backend()), table(table_ptr(backend.load())) {}
};

State &state() {
    static State s;
    return s;
}

}  // namespace

bool backend_available(Backend backend) noexcept { return table_ptr(backend) != nullptr; }

const KernelTable &active() noexcept { return *state().table.load(std::memory_order_acquire); }

const KernelTable &table(Backend backend) {
    const KernelTable *t = table_ptr(backend);
    if (t == nullptr) {
        throw Error(ErrorCategory::invalid_argument,
                    "kernel backend '" + std::string(backend_name(backend)) + "' is not available");
    }
    return *t;
}

Backend active_backend() noexcept { return state().backend.load(std::memory_order_acquire); }

void set_backend(Backend backend) {
    const KernelTable &t = table(backend);
    state().table.store(&t, std::memory_order_release);
    state().backend.store(backend, std::memory_order_release);
}

std::string_view backend_name(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
    }
    return "unknown";
}

}  // namespace cayley::kernels
