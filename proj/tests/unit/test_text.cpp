#include <doctest.h>

#include <filesystem>

#include "linkaudit/errors.hpp"
#include "linkaudit/text.hpp"

using namespace linkaudit;

TEST_SUITE("text") {
  TEST_CASE("ascii helpers") {
    CHECK(to_lower("WWW.Example.ORG") == "www.example.org");
    CHECK(iequals("Content-Type", "content-type"));
    CHECK(!iequals("abc", "abcd"));
    CHECK(istarts_with("HTTP://x", "http://"));
    CHECK(trim("  \t a b \r\n") == "a b");
  }

  TEST_CASE("split keeps empty pieces") {
    const auto parts = split("a,,b,", ',');
    REQUIRE(parts.size() == 4);
    CHECK(parts[1].empty());
    CHECK(parts[3].empty());
  }

  TEST_CASE("atomic writes replace whole files") {
    const auto path = std::filesystem::temp_directory_path() / "linkaudit_text_test.txt";
    write_file_atomic(path, "first\n");
    write_file_atomic(path, "second\n");
    CHECK(read_file(path) == "second\n");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_file(path), LoadError);
  }
}
