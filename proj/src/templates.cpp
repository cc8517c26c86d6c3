#include "halodet/templates.hpp"

#include <fstream>
#include <sstream>

#include "halodet/errors.hpp"

namespace halodet {

// v1 templates. Keep in sync with resources/prompts/; the files are the
// customization point, these are the defaults and the reference content.

const std::string_view kRoutingTemplateV1 =
    "You are given a question and an answer. Decide which specialist culture "
    "or domain is most relevant for judging whether the answer is correct.\n"
    "Specialists: {model_names}\n"
    "\n"
    "Question: {question}\n"
    "Answer: {answer}\n"
    "\n"
    "Reply with exactly one word, the name of the best specialist.\n"
    "Best specialist:";

const std::string_view kSpanTemplateV1 =
    "An answer may contain an incorrect (hallucinated) span around the word "
    "\"{focus}\", seen here in context: \"{left} {focus} {right}\".\n"
    "\n"
    "Answer: {answer}\n"
    "\n"
    "Copy the exact substring of the answer that forms the complete unit of "
    "meaning containing that word, such as a named entity or a clause. Reply "
    "with the substring only.";

std::string render_template(
    std::string_view tmpl,
    std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
    std::string out(tmpl);
    for (const auto& [key, value] : values) {
        const std::string placeholder = "{" + std::string(key) + "}";
        std::size_t pos = 0;
        while ((pos = out.find(placeholder, pos)) != std::string::npos) {
            out.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::string load_template(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read template file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace halodet
