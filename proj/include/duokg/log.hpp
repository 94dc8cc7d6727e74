#pragma once

#include <string_view>

namespace duokg::log {

enum class Level { quiet = 0, info = 1, debug = 2 };

void set_level(Level level);
Level level();

void info(std::string_view message);
void warn(std::string_view message);
void debug(std::string_view message);

}  // namespace duokg::log
