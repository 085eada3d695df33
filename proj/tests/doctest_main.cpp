#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>

namespace {
// expensive tuned artifacts are reusable across runs; default the cache into
// the working directory unless the caller picked a location
struct CacheDirDefault {
    CacheDirDefault() { setenv("HENONLAB_CACHE_DIR", ".henonlab_cache", /*overwrite=*/0); }
} cache_dir_default;
}  // namespace
