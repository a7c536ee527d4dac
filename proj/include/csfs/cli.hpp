#pragma once

namespace csfs {

/// Entry point shared by the csfs binary and the CLI tests. Returns the
/// process exit code; machine-readable errors go to stderr as JSON.
int cli_main(int argc, const char* const* argv);

}  // namespace csfs
