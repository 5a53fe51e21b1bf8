#include "mcpd/kernels.hpp"

#include <stdexcept>

namespace mcpd::kernels {

bool avx2_supported() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const Ops* resolve(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return &scalar_ops();
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (avx2_supported()) return &avx2_ops();
#endif
      throw std::invalid_argument("avx2 backend is not supported on this cpu");
    case Backend::Auto:
#if defined(__x86_64__) || defined(_M_X64)
      if (avx2_supported()) return &avx2_ops();
#endif
      return &scalar_ops();
  }
  throw std::logic_error("unreachable backend kind");
}

const Ops*& active_slot() noexcept {
  static const Ops* slot = resolve(Backend::Auto);
  return slot;
}

Backend& backend_slot() noexcept {
  static Backend value = Backend::Auto;
  return value;
}

}  // namespace

void select_backend(Backend backend) {
  const Ops* ops = resolve(backend);
  active_slot() = ops;
  backend_slot() = backend;
}

Backend selected_backend() noexcept { return backend_slot(); }

const Ops& active() noexcept { return *active_slot(); }

Backend backend_from_string(const std::string& name) {
  if (name == "auto") return Backend::Auto;
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  throw std::invalid_argument("unknown backend '" + name +
                              "' (expected auto, scalar, or avx2)");
}

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::Auto:
      return "auto";
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  throw std::logic_error("unreachable backend kind");
}

}  // namespace mcpd::kernels
