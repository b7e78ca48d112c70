#include "dqo/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstdio>
#include <mutex>
#include <string>

namespace dqo::log {

namespace {

Level from_environment() noexcept {
  const char* raw = std::getenv("DQO_LOG_LEVEL");
  if (!raw) return Level::Warn;
  const std::string_view v(raw);
  if (v == "error") return Level::Error;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

std::atomic<int>& current() {
  static std::atomic<int> value{static_cast<int>(from_environment())};
  return value;
}

constexpr const char* kNames[] = {"error", "warn", "info", "debug"};

}  // namespace

Level level() noexcept { return static_cast<Level>(current().load()); }

void set_level(Level l) noexcept { current().store(static_cast<int>(l)); }

void write(Level l, std::string_view message) {
  if (static_cast<int>(l) > current().load()) return;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::fprintf(stderr, "[dqo %s] %.*s\n", kNames[static_cast<int>(l)], static_cast<int>(message.size()),
               message.data());
}

}  // namespace dqo::log
