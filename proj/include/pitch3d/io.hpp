#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

#include <json.hpp>

namespace pitch3d::io {

/// %.17g; throws Error(FormatError) on non-finite values.
std::string format_real(double value);
void append_real(std::string& out, double value);

/// JSON text with every floating-point number written by format_real.
std::string dump_json(const nlohmann::json& value);

/// Writes to `path`.tmp then renames; nothing is left behind on failure.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

std::string read_text(const std::filesystem::path& path);

}  // namespace pitch3d::io
