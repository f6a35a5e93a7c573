#ifndef SEGAUDIT_CLI_HPP
#define SEGAUDIT_CLI_HPP

namespace segaudit::cli {

// Exit codes: 0 success, 1 validation/usage error, 2 I/O error, 3 internal.
int run(int argc, const char* const* argv);

}  // namespace segaudit::cli

#endif
