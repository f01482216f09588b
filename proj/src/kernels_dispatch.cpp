#include "malign/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace malign::kern {

namespace {

const Kernels* pick_best() {
    const char* env = std::getenv("MALIGN_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar();
    if (const Kernels* k = avx2_if_supported()) return k;
    return &scalar();
}

const Kernels*& active_slot() {
    static const Kernels* slot = pick_best();
    return slot;
}

}  // namespace

const Kernels& active() { return *active_slot(); }

void set_active(const Kernels& k) { active_slot() = &k; }

}  // namespace malign::kern
