#include "log.hpp"

#include <cstdio>

namespace pup {

namespace {

LogCallback g_callback = nullptr;
void* g_user_data = nullptr;

}  // namespace

void set_log_callback(LogCallback callback, void* user_data) {
  g_callback = callback;
  g_user_data = callback ? user_data : nullptr;
}

void log_warning(const std::string& message) {
  if (g_callback) {
    g_callback(message.c_str(), g_user_data);
  } else {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
  }
}

}  // namespace pup
