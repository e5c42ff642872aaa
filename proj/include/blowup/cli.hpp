#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace blowup::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kIo = 3, kInternal = 4 };

/// One configuration key: namespaced config-file name plus its command-line flag.
struct KeySpec {
    std::string key;      ///< e.g. "grid.dr"
    std::string flag;     ///< e.g. "--dr"
    std::string units;
    std::string default_value;  ///< empty = required, except sweep.eps which is optional
    std::string help;
    bool is_flag = false; ///< boolean switch
};

/// Every key the tool understands.
const std::vector<KeySpec>& key_registry();

/// Parses flat `key = value` text ('#' starts a comment). Throws ConfigError for
/// malformed lines or keys outside the registry.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Entry point shared by the executable and the tests. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blowup::cli
