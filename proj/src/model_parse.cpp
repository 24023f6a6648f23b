#include "cohlab/model_parse.hpp"

#include <charconv>
#include <map>
#include <set>
#include <string>

#include "cohlab/error.hpp"

namespace cohlab {

namespace {

using Fields = std::map<std::string, int, std::less<>>;

Fields parse_fields(std::string_view body, const std::set<std::string, std::less<>>& allowed,
                    std::string_view kind) {
  Fields fields;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t comma = std::min(body.find(',', pos), body.size());
    const std::string_view item = body.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError(std::string(kind) + ": expected key=value, got \"" + std::string(item) + "\"");
    const std::string_view key = item.substr(0, eq), value = item.substr(eq + 1);
    if (!allowed.contains(key)) throw ParseError(std::string(kind) + ": unknown key \"" + std::string(key) + "\"");
    int v = 0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || end != value.data() + value.size())
      throw ParseError(std::string(kind) + ": bad integer for " + std::string(key));
    if (!fields.emplace(std::string(key), v).second) throw ParseError(std::string(kind) + ": repeated key " + std::string(key));
    pos = comma + 1;
  }
  return fields;
}

int require(const Fields& f, std::string_view key, std::string_view kind) {
  auto it = f.find(key);
  if (it == f.end()) throw ParseError(std::string(kind) + ": missing key " + std::string(key));
  return it->second;
}

}  // namespace

VarietyModel parse_model(std::string_view descriptor) {
  const std::size_t colon = descriptor.find(':');
  if (colon == std::string_view::npos) throw ParseError("model descriptor needs a kind prefix, e.g. lowrank:m=2,n=2,r=1");
  const std::string_view kind = descriptor.substr(0, colon);
  const std::string_view body = descriptor.substr(colon + 1);

  try {
    if (kind == "linear") {
      if (body.empty() || body.front() != '@') throw ParseError("linear: expected linear:@file.flat");
      return VarietyModel::linear(load_flat(std::string(body.substr(1))));
    }
    if (kind == "lowrank") {
      const Fields f = parse_fields(body, {"m", "n", "r"}, kind);
      return VarietyModel::low_rank(require(f, "m", kind), require(f, "n", kind), require(f, "r", kind));
    }
    if (kind == "symlowrank") {
      const Fields f = parse_fields(body, {"n", "r", "isometric"}, kind);
      const bool iso = f.contains("isometric") && f.at("isometric") != 0;
      return VarietyModel::sym_low_rank(require(f, "n", kind), require(f, "r", kind), iso);
    }
    if (kind == "unitgram") {
      const Fields f = parse_fields(body, {"n", "r"}, kind);
      return VarietyModel::unit_gram(require(f, "n", kind), require(f, "r", kind));
    }
    if (kind == "cayley") {
      const Fields f = parse_fields(body, {"n", "d"}, kind);
      return VarietyModel::cayley_menger(require(f, "n", kind), require(f, "d", kind));
    }
    if (kind == "block") {
      const Fields f = parse_fields(body, {"n", "k"}, kind);
      return VarietyModel::linear(block_flat(require(f, "n", kind), require(f, "k", kind)));
    }
    if (kind == "maxinc") {
      const Fields f = parse_fields(body, {"n", "k"}, kind);
      return VarietyModel::linear(max_incoherent_flat(require(f, "n", kind), require(f, "k", kind)));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(descriptor) + ": " + e.what());
  }
  throw ParseError("unknown model kind \"" + std::string(kind) + "\"");
}

}  // namespace cohlab
