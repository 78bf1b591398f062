// cli.hpp — command-line front end, exposed as a function so tests can
// drive it in-process

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "busq/model.hpp"

namespace busq {

// Exit codes: 0 success, 1 validation mismatch, 2 usage/config error,
// 3 solver/capacity error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

// "exp:0.1", "det:10", "erlang:2:0.2", "hyper:0.5,0.5:0.2,0.05".
ServiceSpec parse_service_spec(const std::string& text);

// key = value lines, '#' comments. Returns (key, value) pairs in file order;
// throws std::runtime_error naming the line on a malformed entry.
std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path);

} // namespace busq
