#ifndef XASPECT_CLI_HPP
#define XASPECT_CLI_HPP

namespace xaspect {

// Full command-line surface. Returns the process exit code: 0 on success,
// 1 on usage errors, 2 on data/config/training errors.
int run_cli(int argc, const char* const* argv);

}  // namespace xaspect

#endif
