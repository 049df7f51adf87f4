#include "common/la.hpp"

#include <dlfcn.h>
#if defined(__GLIBC__) || defined(__linux__)
#include <malloc.h>
#endif

#include <cstdlib>
#include <fstream>
#include <string>

#include "common/error.hpp"

namespace aep::la {

namespace {

// CBLAS ABI constants; stable across implementations.
constexpr int kRowMajor = 101;
constexpr int kNoTrans = 111;
constexpr int kTrans = 112;

using DgemmFn = void (*)(int order, int trans_a, int trans_b, int m, int n,
                         int k, double alpha, const double* a, int lda,
                         const double* b, int ldb, double beta, double* c,
                         int ldc);

// OpenBLAS picks its compute kernels in the shared library's load-time
// constructor, reading OPENBLAS_CORETYPE at that moment. Builds that predate
// the running CPU's model id silently fall back to the generic Prescott
// kernel at a fraction of the machine's throughput. Loading the library
// lazily lets us set the core type from the instruction sets the CPU
// actually advertises before that constructor runs. An explicit
// OPENBLAS_CORETYPE in the environment always wins.
void pick_core_type() {
  if (std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.compare(0, 5, "flags") != 0) continue;
    auto has = [&line](const char* f) {
      return line.find(std::string(" ") + f) != std::string::npos;
    };
    if (has("avx512f") && has("avx512dq"))
      setenv("OPENBLAS_CORETYPE", "SKYLAKEX", 0);
    else if (has("avx2") && has("fma"))
      setenv("OPENBLAS_CORETYPE", "HASWELL", 0);
    break;
  }
}

DgemmFn load_dgemm() {
#ifdef M_MMAP_THRESHOLD
  // Training churns large short-lived activation buffers. Above glibc's mmap
  // threshold every allocation is served by fresh zero-filled pages, which
  // costs more than the arithmetic on them; keep big blocks on the reusable
  // heap and stop it from being trimmed back between steps.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  pick_core_type();
  void* lib = dlopen("libopenblas.so.0", RTLD_NOW | RTLD_LOCAL);
  if (lib == nullptr) lib = dlopen("libopenblas.so", RTLD_NOW | RTLD_LOCAL);
  if (lib == nullptr)
    throw StateError(std::string("cannot load libopenblas: ") + dlerror());
  // One BLAS thread, always: reproducible accumulation order and no
  // oversubscription of the learner core.
  if (auto* set_threads = reinterpret_cast<void (*)(int)>(
          dlsym(lib, "openblas_set_num_threads")))
    set_threads(1);
  auto* fn = reinterpret_cast<DgemmFn>(dlsym(lib, "cblas_dgemm"));
  if (fn == nullptr) throw StateError("libopenblas exports no cblas_dgemm");
  return fn;
}

DgemmFn dgemm() {
  static DgemmFn fn = load_dgemm();
  return fn;
}

}  // namespace

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha,
          const double* a, int lda, const double* b, int ldb, double beta,
          double* c, int ldc) {
  dgemm()(kRowMajor, trans_a ? kTrans : kNoTrans, trans_b ? kTrans : kNoTrans,
          m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace aep::la
