#include <benchmark/benchmark.h>

// Own main: the distro ships benchmark_main only as an LTO archive tied to
// one compiler build.
BENCHMARK_MAIN();
