#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isingcorr {

// Entry point of the command-line tool. args holds the arguments after the
// program name; out receives result records (CSV or JSON), err receives
// diagnostics. Returns the process exit code: 0 success, 1 runtime failure,
// 2 validation failure, 64 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace isingcorr
