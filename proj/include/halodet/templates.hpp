#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace halodet {

// Prompt templates are part of the external interface: changing one changes
// results, so their contents enter the config fingerprint. The built-in
// defaults match the files shipped under resources/prompts/.

extern const std::string_view kRoutingTemplateV1;  // {question} {answer} {model_names}
extern const std::string_view kSpanTemplateV1;     // {answer} {left} {focus} {right}

// Replaces every "{key}" occurrence. Unknown placeholders are left intact.
std::string render_template(
    std::string_view tmpl,
    std::initializer_list<std::pair<std::string_view, std::string_view>> values);

std::string load_template(const std::filesystem::path& path);  // throws IoError

}  // namespace halodet
