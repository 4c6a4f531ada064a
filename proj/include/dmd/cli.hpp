#pragma once

namespace dmd {

// Full CLI entry point (kept in the library so tests can drive it in-process).
// Exit codes: 0 ok, 2 unknown command / bad flags, 3 invalid instance,
// 4 resource or solver limit.
int cli_main(int argc, const char* const* argv);

}  // namespace dmd
