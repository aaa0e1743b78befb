#ifndef OSWR_TESTS_TEST_SUPPORT_HPP_
#define OSWR_TESTS_TEST_SUPPORT_HPP_

#include <filesystem>
#include <string>

namespace oswr::test {

inline std::filesystem::path config_path(const std::string &name) {
  return std::filesystem::path(OSWR_CONFIG_DIR) / name;
}

}  // namespace oswr::test

#endif  // OSWR_TESTS_TEST_SUPPORT_HPP_
