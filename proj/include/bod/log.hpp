#pragma once

namespace bod {

/// Configures the default spdlog logger (stderr) from the BOD_LOG
/// environment variable: trace, debug, info, warn, error, critical or off.
/// Defaults to warn.
void init_logging();

}  // namespace bod
