#pragma once

#include <map>
#include <string>

namespace mithril {

// Plain-text config files: one `key = value` pair per line, `#` comments,
// blank lines ignored. Returns keys in file order-independent map form.
std::map<std::string, std::string> parse_key_value_file(const std::string& path);
std::map<std::string, std::string> parse_key_value_text(const std::string& text,
                                                        const std::string& origin);

}  // namespace mithril
