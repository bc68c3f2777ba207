#pragma once

#include <string_view>

namespace gridflow::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

// Reads GRIDFLOW_LOG={error|info|debug}; unset or unknown values mean "info".
void init_from_env();
void set_level(Level level);
Level level();

void error(std::string_view message);
void warn(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

}  // namespace gridflow::log
