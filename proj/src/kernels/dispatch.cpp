#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "signcop/error.hpp"

namespace signcop::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(SIGNCOP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("SIGNCOP_KERNELS")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{&table(detect())};
  return t;
}

std::atomic<Backend>& current_backend() {
  static std::atomic<Backend> b{detect()};
  return b;
}

template <class A, class B>
void require_same(const A& a, const B& b, const char* what) {
  if (a.size() != b.size()) throw DimensionError(std::string(what) + ": length mismatch");
}

}  // namespace

std::string_view backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend b) {
  return b == Backend::Scalar || cpu_has_avx2();
}

const KernelTable& table(Backend b) {
  if (b == Backend::Scalar) return detail::scalar_table();
#if defined(SIGNCOP_HAVE_AVX2)
  if (cpu_has_avx2()) return detail::avx2_table();
#endif
  throw ConfigError("kernel backend '" + std::string(backend_name(b)) + "' is not available");
}

Backend active_backend() { return current_backend().load(); }

void set_backend(Backend b) {
  const KernelTable* t = &table(b);
  current().store(t);
  current_backend().store(b);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same(a, b, "dot");
  return current().load()->dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same(x, y, "axpy");
  current().load()->axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(ConstMatrixView p, std::span<const double> v, std::span<double> out) {
  if (v.size() != p.cols || out.size() != p.rows) throw DimensionError("gemv: shape mismatch");
  current().load()->gemv(p.data, p.rows, p.cols, v.data(), out.data());
}

void gemv_t(ConstMatrixView p, std::span<const double> w, std::span<double> out) {
  if (w.size() != p.rows || out.size() != p.cols) throw DimensionError("gemv_t: shape mismatch");
  current().load()->gemv_t(p.data, p.rows, p.cols, w.data(), out.data());
}

void syrk_weighted(ConstMatrixView p, std::span<const double> w, std::span<double> s) {
  if (w.size() != p.rows || s.size() != p.cols * p.cols)
    throw DimensionError("syrk_weighted: shape mismatch");
  current().load()->syrk_weighted(p.data, p.rows, p.cols, w.data(), s.data());
}

void row_sq_norms(ConstMatrixView p, std::span<double> out) {
  if (out.size() != p.rows) throw DimensionError("row_sq_norms: shape mismatch");
  current().load()->row_sq_norms(p.data, p.rows, p.cols, out.data());
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  require_same(a, b, "hadamard");
  require_same(a, out, "hadamard");
  current().load()->hadamard(a.data(), b.data(), out.data(), a.size());
}

}  // namespace signcop::kernels
