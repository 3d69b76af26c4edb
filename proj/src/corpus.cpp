#include "hml/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hml {

using nlohmann::json;

std::string label_name(Label l) {
  switch (l) {
    case Label::Real:
      return "real";
    case Label::Fake:
      return "fake";
    default:
      return "unlabeled";
  }
}

Corpus::Corpus(std::vector<std::pair<std::string, int>> schema,
               std::vector<NewsItem> items)
    : schema_(std::move(schema)), items_(std::move(items)) {
  require(!items_.empty(), "empty corpus");
  std::sort(items_.begin(), items_.end(),
            [](const NewsItem& a, const NewsItem& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto [it, inserted] = index_.emplace(items_[i].id, i);
    require(inserted, "duplicate id: " + items_[i].id);
  }

  // Group into events; members sorted by (timestamp, id), events by id.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items_.size(); ++i)
    groups[items_[i].event_id].push_back(i);
  item_event_.resize(items_.size());
  for (auto& [eid, members] : groups) {
    std::stable_sort(members.begin(), members.end(),
                     [this](std::size_t a, std::size_t b) {
                       if (items_[a].timestamp != items_[b].timestamp)
                         return items_[a].timestamp < items_[b].timestamp;
                       return items_[a].id < items_[b].id;
                     });
    Event ev;
    ev.id = eid;
    for (std::size_t i : members) {
      ev.member_ids.push_back(items_[i].id);
      item_event_[i] = events_.size();
    }
    event_index_.emplace(eid, events_.size());
    events_.push_back(std::move(ev));
  }
}

bool Corpus::has_modality(std::string_view name) const {
  for (const auto& [n, d] : schema_)
    if (n == name) return true;
  return false;
}

int Corpus::modality_dim(std::string_view name) const {
  for (const auto& [n, d] : schema_)
    if (n == name) return d;
  throw Error("unknown modality: " + std::string(name));
}

std::size_t Corpus::index_of(std::string_view id) const {
  auto it = index_.find(id);
  require(it != index_.end(), "unknown item id: " + std::string(id));
  return it->second;
}

const NewsItem& Corpus::item(std::string_view id) const {
  return items_[index_of(id)];
}

const Event& Corpus::event(std::string_view event_id) const {
  auto it = event_index_.find(event_id);
  require(it != event_index_.end(),
          "unknown event id: " + std::string(event_id));
  return events_[it->second];
}

std::size_t Corpus::event_index_of_item(std::size_t item_index) const {
  require(item_index < items_.size(), "item index out of range");
  return item_event_[item_index];
}

namespace {

const std::set<std::string> kItemKeys = {"id",    "event_id", "timestamp",
                                         "label", "features", "attributes"};

Label parse_label(const json& j, int line) {
  if (j.is_null()) return Label::Unlabeled;
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "real") return Label::Real;
    if (s == "fake") return Label::Fake;
  }
  throw Error("line " + std::to_string(line) +
              ": label must be \"real\", \"fake\" or null");
}

NewsItem parse_item(const json& j, int line) {
  require(j.is_object(), "line " + std::to_string(line) + ": not an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    require(kItemKeys.count(it.key()) > 0,
            "line " + std::to_string(line) + ": unknown key \"" + it.key() +
                "\"");
  for (const auto& k : kItemKeys)
    require(j.contains(k),
            "line " + std::to_string(line) + ": missing key \"" + k + "\"");

  NewsItem item;
  require(j["id"].is_string() && j["event_id"].is_string(),
          "line " + std::to_string(line) + ": id and event_id must be strings");
  item.id = j["id"].get<std::string>();
  item.event_id = j["event_id"].get<std::string>();
  require(j["timestamp"].is_number(),
          "line " + std::to_string(line) + ": timestamp must be a number");
  item.timestamp = j["timestamp"].get<double>();
  item.label = parse_label(j["label"], line);

  require(j["features"].is_object(),
          "line " + std::to_string(line) + ": features must be an object");
  for (auto it = j["features"].begin(); it != j["features"].end(); ++it) {
    require(it.value().is_array(), "line " + std::to_string(line) +
                                       ": feature \"" + it.key() +
                                       "\" must be an array");
    std::vector<double> v;
    for (const auto& x : it.value()) {
      require(x.is_number(), "line " + std::to_string(line) + ": feature \"" +
                                 it.key() + "\" has a non-numeric entry");
      v.push_back(x.get<double>());
    }
    item.features[it.key()] = std::move(v);
  }

  require(j["attributes"].is_object(),
          "line " + std::to_string(line) + ": attributes must be an object");
  for (auto it = j["attributes"].begin(); it != j["attributes"].end(); ++it) {
    if (it.value().is_string())
      item.attributes[it.key()] = it.value().get<std::string>();
    else if (it.value().is_number())
      item.attributes[it.key()] = it.value().get<double>();
    else
      throw Error("line " + std::to_string(line) + ": attribute \"" +
                  it.key() + "\" must be a string or number");
  }
  return item;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open corpus file: " + path.string());

  std::string line;
  int line_no = 0;
  std::vector<std::pair<std::string, int>> schema;
  std::vector<NewsItem> items;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("line " + std::to_string(line_no) +
                  ": malformed JSON: " + e.what());
    }
    if (!have_header) {
      require(j.is_object() && j.contains("schema"),
              "line 1: expected header object with \"schema\"");
      for (const auto& entry : j["schema"]) {
        require(entry.is_array() && entry.size() == 2 &&
                    entry[0].is_string() && entry[1].is_number_integer(),
                "line 1: schema entries must be [name, dim] pairs");
        schema.emplace_back(entry[0].get<std::string>(), entry[1].get<int>());
      }
      have_header = true;
      continue;
    }
    items.push_back(parse_item(j, line_no));
  }
  require(have_header && !items.empty(), "empty corpus");

  Corpus corpus(std::move(schema), std::move(items));
  auto violations = validate(corpus);
  if (!violations.empty()) throw Error("invalid corpus: " + violations[0]);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), "cannot write corpus file: " + path.string());
  json header;
  header["schema"] = json::array();
  for (const auto& [name, dim] : corpus.schema())
    header["schema"].push_back(json::array({name, dim}));
  out << header.dump() << "\n";
  for (const NewsItem& item : corpus.items()) {
    json j;
    j["id"] = item.id;
    j["event_id"] = item.event_id;
    j["timestamp"] = item.timestamp;
    if (item.label == Label::Unlabeled)
      j["label"] = nullptr;
    else
      j["label"] = label_name(item.label);
    j["features"] = json::object();
    for (const auto& [name, v] : item.features) j["features"][name] = v;
    j["attributes"] = json::object();
    for (const auto& [name, a] : item.attributes) {
      if (std::holds_alternative<std::string>(a))
        j["attributes"][name] = std::get<std::string>(a);
      else
        j["attributes"][name] = std::get<double>(a);
    }
    out << j.dump() << "\n";
  }
  require(out.good(), "write failed: " + path.string());
}

std::vector<std::string> validate(const Corpus& corpus) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const NewsItem& item : corpus.items()) {
    if (!seen.insert(item.id).second)
      out.push_back("item " + item.id + ": duplicate id");
    if (!std::isfinite(item.timestamp) || item.timestamp < 0.0)
      out.push_back("item " + item.id +
                    ": timestamp must be finite and >= 0");
    for (const auto& [name, dim] : corpus.schema()) {
      auto it = item.features.find(name);
      if (it == item.features.end()) {
        out.push_back("item " + item.id + ": missing modality " + name);
        continue;
      }
      if (static_cast<int>(it->second.size()) != dim) {
        out.push_back("item " + item.id + ": modality " + name +
                      " has dimension " + std::to_string(it->second.size()) +
                      ", schema says " + std::to_string(dim));
        continue;
      }
      for (double v : it->second) {
        if (!std::isfinite(v)) {
          out.push_back("item " + item.id + ": modality " + name +
                        " has a non-finite entry");
          break;
        }
      }
    }
    for (const auto& [name, v] : item.features) {
      if (!corpus.has_modality(name))
        out.push_back("item " + item.id + ": modality " + name +
                      " not in schema");
    }
    for (const auto& [name, a] : item.attributes) {
      if (std::holds_alternative<double>(a) &&
          !std::isfinite(std::get<double>(a)))
        out.push_back("item " + item.id + ": attribute " + name +
                      " is not finite");
    }
  }
  for (const Event& ev : corpus.events()) {
    if (ev.member_ids.empty()) {
      out.push_back("event " + ev.id + ": no members");
      continue;
    }
    double prev = -1.0;
    for (const auto& id : ev.member_ids) {
      double t = corpus.item(id).timestamp;
      if (t < prev)
        out.push_back("event " + ev.id + ": member timestamps decrease at " +
                      id);
      prev = t;
    }
  }
  return out;
}

}  // namespace hml
