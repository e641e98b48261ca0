#pragma once

// Data-parallel inner loops shared by the low-rank algebra.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds
// with SIGNCOP_HAVE_AVX2, an AVX2/FMA variant. The variant is chosen once at
// startup from CPUID; set SIGNCOP_KERNELS=scalar in the environment to force
// the reference path. Both paths reduce in a fixed order, so results are
// deterministic per backend (they differ from each other only by rounding).

#include <cstddef>
#include <span>
#include <string_view>

#include "signcop/matrix.hpp"

namespace signcop::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);
bool backend_available(Backend b);
Backend active_backend();
// Throws ConfigError if `b` is not available on this build/CPU.
void set_backend(Backend b);

// Σ a_i b_i
double dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// out_i = P_i · v, for every row i of P.
void gemv(ConstMatrixView p, std::span<const double> v, std::span<double> out);
// out = Σ_i w_i P_i  (i.e. Pᵀ w).
void gemv_t(ConstMatrixView p, std::span<const double> w, std::span<double> out);
// s += Σ_i w_i P_i P_iᵀ, s is a dense row-major d×d matrix.
void syrk_weighted(ConstMatrixView p, std::span<const double> w, std::span<double> s);
// out_i = ‖P_i‖²
void row_sq_norms(ConstMatrixView p, std::span<double> out);
// out_i = a_i * b_i
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out);

// The kernel table each backend provides. Exposed so tests can call a
// specific backend directly and compare them.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*gemv)(const double* p, std::size_t rows, std::size_t cols, const double* v, double* out);
  void (*gemv_t)(const double* p, std::size_t rows, std::size_t cols, const double* w, double* out);
  void (*syrk_weighted)(const double* p, std::size_t rows, std::size_t cols, const double* w,
                        double* s);
  void (*row_sq_norms)(const double* p, std::size_t rows, std::size_t cols, double* out);
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
};

// Throws ConfigError if the backend was not compiled in or the CPU lacks it.
const KernelTable& table(Backend b);

}  // namespace signcop::kernels
