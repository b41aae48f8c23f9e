#pragma once

#include <string>

namespace pup {

using LogCallback = void (*)(const char* message, void* user_data);

// Replaces the warning sink; null restores the default (stderr).
void set_log_callback(LogCallback callback, void* user_data);

void log_warning(const std::string& message);

}  // namespace pup
