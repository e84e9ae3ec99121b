// One test case per acceptance criterion; each prints a single PASS/FAIL line.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mqm/checks.hpp"

#include <iostream>

namespace {

void run(int id)
{
    const mqm::CheckResult r = mqm::acceptance_check(id);
    std::cout << mqm::format_line(r) << std::endl;
    CHECK_MESSAGE(r.passed, r.detail);
}

} // namespace

TEST_CASE("criterion_1") { run(1); }
TEST_CASE("criterion_2") { run(2); }
TEST_CASE("criterion_3") { run(3); }
TEST_CASE("criterion_4") { run(4); }
TEST_CASE("criterion_5") { run(5); }
TEST_CASE("criterion_6") { run(6); }
TEST_CASE("criterion_7") { run(7); }
TEST_CASE("criterion_8") { run(8); }
TEST_CASE("criterion_9") { run(9); }
TEST_CASE("criterion_10") { run(10); }
TEST_CASE("criterion_11") { run(11); }
