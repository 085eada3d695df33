#include "doctest.h"
#include "henonlab/overlap.hpp"
TEST_SUITE("overlap") {}
