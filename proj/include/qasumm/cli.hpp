#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qasumm {

// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace qasumm
