// Minimal leveled logging to stderr. Thread-safe; one line per call.
#ifndef PLANSEL_LOGGING_H_
#define PLANSEL_LOGGING_H_

#include <string_view>

namespace plansel {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarning = 2, kError = 3, kOff = 4 };

void SetLogLevel(LogLevel level);
LogLevel GetLogLevel();
// Accepts debug, info, warning, error, off.
LogLevel ParseLogLevel(std::string_view text);

void Log(LogLevel level, std::string_view message);

}  // namespace plansel

#endif  // PLANSEL_LOGGING_H_
