#include "gridflow/common/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace gridflow::log {

namespace {

Level g_level = Level::Info;

spdlog::logger& logger() {
    static auto instance = [] {
        auto l = std::make_shared<spdlog::logger>("gridflow",
                                                  std::make_shared<spdlog::sinks::stderr_sink_mt>());
        l->set_pattern("[%H:%M:%S.%e] [%l] %v");
        l->set_level(spdlog::level::info);
        return l;
    }();
    return *instance;
}

spdlog::level::level_enum to_spdlog(Level level) {
    switch (level) {
        case Level::Error: return spdlog::level::warn;
        case Level::Info: return spdlog::level::info;
        case Level::Debug: return spdlog::level::debug;
    }
    return spdlog::level::info;
}

}  // namespace

void init_from_env() {
    char const* env = std::getenv("GRIDFLOW_LOG");
    std::string value = env ? env : "";
    if (value == "error") {
        set_level(Level::Error);
    } else if (value == "debug") {
        set_level(Level::Debug);
    } else {
        set_level(Level::Info);
    }
}

void set_level(Level level) {
    g_level = level;
    logger().set_level(to_spdlog(level));
}

Level level() { return g_level; }

void error(std::string_view message) { logger().error("{}", message); }
void warn(std::string_view message) { logger().warn("{}", message); }
void info(std::string_view message) { logger().info("{}", message); }
void debug(std::string_view message) { logger().debug("{}", message); }

}  // namespace gridflow::log
