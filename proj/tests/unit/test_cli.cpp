#include <catch2/catch_amalgamated.hpp>

TEST_CASE("placeholder until the cli lands") { CHECK(true); }
