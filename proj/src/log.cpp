#include "microdl/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace microdl {

namespace {

std::atomic<bool> g_verbose{false};
std::mutex g_mutex;

void default_sink(LogLevel level, const std::string& msg) {
  if (level == LogLevel::kInfo && !g_verbose.load()) return;
  std::cerr << (level == LogLevel::kWarning ? "warning: " : "info: ") << msg << '\n';
}

LogSink& sink() {
  static LogSink s = default_sink;
  return s;
}

}  // namespace

LogSink set_log_sink(LogSink s) {
  std::lock_guard<std::mutex> lock(g_mutex);
  LogSink previous = std::move(sink());
  sink() = s ? std::move(s) : LogSink(default_sink);
  return previous;
}

void set_verbose(bool verbose) { g_verbose.store(verbose); }

void log_info(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  sink()(LogLevel::kInfo, msg);
}

void log_warning(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  sink()(LogLevel::kWarning, msg);
}

}  // namespace microdl
