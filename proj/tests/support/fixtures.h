#ifndef PLANSEL_TESTS_FIXTURES_H_
#define PLANSEL_TESTS_FIXTURES_H_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace plansel::testing {

inline std::string FixturePath(const std::string& name) {
  return std::string(PLANSEL_FIXTURE_DIR) + "/" + name;
}

inline std::string ReadFixture(const std::string& name) {
  std::ifstream in(FixturePath(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace plansel::testing

#endif  // PLANSEL_TESTS_FIXTURES_H_
