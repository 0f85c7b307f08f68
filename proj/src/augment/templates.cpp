#include <algorithm>
#include <set>

#include "la3/augment.hpp"
#include "la3/hash.hpp"

namespace la3::augment {

const PromptTemplate& molecule_caption_template() {
  static const PromptTemplate t{
      "molecule_caption",
      R"(You are now a chemical specialist in rewriting captions for a molecule in SMILES format. Make sure those captions describe the given molecule correctly and precisely based on your two inputs (SMILES and Caption of it). Also, make sure your rewriting captions do not include the input SMILES. Write the response without using linebreaks, newlines, or special characters such as "\t" or "\n".)",
      "SMILES string of target molecule: {SMILES}.\n"
      "Description of the molecule: {caption}.\n"
      "Task: Rewrite the following molecule with its SMILES and caption. The newly rewritten caption should be "
      "elaborate, descriptive, and concise, highlighting the key structural features and biological activities of "
      "the molecule. Only output rewritten caption without any header and linebreak.\n"
      "Answer:"};
  return t;
}

const PromptTemplate& molecule_description_template() {
  static const PromptTemplate t{
      "molecule_description",
      "You are now a chemical specialist in rewriting descriptions for a molecule in SMILES format. Make sure those "
      "descriptions describe the given molecule correctly and precisely based on your two inputs (SMILES and "
      "Description of it). Also, make sure your rewriting captions do not include the input SMILES.",
      "SMILES string of target molecule: {SMILES}.\n"
      "Description of the molecule: {description}.\n"
      "Task: Rewrite the following molecule with its SMILES and description. The newly rewritten caption should be "
      "elaborate, descriptive, and concise, highlighting the key structural features and biological activities of "
      "the molecule. Only output rewritten caption without any header and linebreak.\n"
      "Answer:"};
  return t;
}

const PromptTemplate& image_caption_template() {
  static const PromptTemplate t{
      "image_caption",
      "You are now a specialist in rewriting descriptions for an image. Make sure those descriptions describe the "
      "given image correctly and precisely.",
      "Description of the image: {description}.\n"
      "Task: Rewrite the following description. The newly rewritten caption should be elaborate, descriptive, and "
      "concise, highlighting the key knowledge of the molecule. Only output rewritten caption without any header "
      "and linebreak.\n"
      "Answer:"};
  return t;
}

const std::vector<PromptTemplate>& builtin_templates() {
  static const std::vector<PromptTemplate> all{molecule_caption_template(), molecule_description_template(),
                                               image_caption_template()};
  return all;
}

const PromptTemplate& template_by_name(std::string_view name) {
  for (const auto& t : builtin_templates()) {
    if (t.name == name) return t;
  }
  throw ConfigError("unknown prompt template '" + std::string(name) + "'");
}

std::string template_hash(const PromptTemplate& t) {
  std::string blob = t.name;
  blob += '\0';
  blob += t.instruction;
  blob += '\0';
  blob += t.message;
  return to_hex(fnv1a64(blob));
}

Prompt build_prompt(const PromptTemplate& t, const dataset::MoleculeRecord& record) {
  std::string out;
  out.reserve(t.message.size() + record.smiles.size() + record.caption.size());
  std::set<std::string> used;
  std::size_t pos = 0;
  while (pos < t.message.size()) {
    const auto open = t.message.find('{', pos);
    if (open == std::string::npos) {
      out.append(t.message, pos);
      break;
    }
    const auto close = t.message.find('}', open);
    if (close == std::string::npos) throw PromptError("unterminated placeholder in template " + t.name);
    out.append(t.message, pos, open - pos);
    const std::string name = t.message.substr(open + 1, close - open - 1);
    const std::string* value = nullptr;
    if (name == "SMILES") {
      value = &record.smiles;
    } else if (name == "caption" || name == "description") {
      value = &record.caption;
    }
    if (value == nullptr || value->empty()) throw PromptError("unresolved placeholder {" + name + "}");
    if (!used.insert(name).second) throw PromptError("placeholder {" + name + "} appears twice");
    out += *value;
    pos = close + 1;
  }
  return {t.instruction, std::move(out)};
}

}  // namespace la3::augment
