#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hml/common.hpp"

namespace hml {

enum class Label { Real, Fake, Unlabeled };

std::string label_name(Label l);

/// Attribute values are either categorical strings or real scalars.
using Attribute = std::variant<std::string, double>;

struct NewsItem {
  std::string id;
  std::string event_id;
  double timestamp = 0.0;  // seconds since corpus epoch
  Label label = Label::Unlabeled;
  std::map<std::string, std::vector<double>> features;  // modality -> vector
  std::map<std::string, Attribute> attributes;
};

/// News items covering the same real-world topic, ordered by publication
/// time. Members are stored as ids; the corpus resolves them to items.
struct Event {
  std::string id;
  std::vector<std::string> member_ids;  // ascending (timestamp, id)
};

/// Immutable collection of news items plus the events derived from their
/// event ids. Items are kept in lexicographic id order, which is the
/// canonical node ordering for every adjacency matrix built downstream.
class Corpus {
 public:
  Corpus(std::vector<std::pair<std::string, int>> schema,
         std::vector<NewsItem> items);

  const std::vector<std::pair<std::string, int>>& schema() const {
    return schema_;
  }
  const std::vector<NewsItem>& items() const { return items_; }
  const std::vector<Event>& events() const { return events_; }

  std::size_t size() const { return items_.size(); }

  bool has_modality(std::string_view name) const;
  int modality_dim(std::string_view name) const;

  std::size_t index_of(std::string_view id) const;
  const NewsItem& item(std::string_view id) const;
  const Event& event(std::string_view event_id) const;
  std::size_t event_index_of_item(std::size_t item_index) const;

 private:
  std::vector<std::pair<std::string, int>> schema_;
  std::vector<NewsItem> items_;
  std::vector<Event> events_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, std::size_t, std::less<>> event_index_;
  std::vector<std::size_t> item_event_;  // item index -> event index
};

/// Reads a line-delimited corpus file (header line with the schema, one
/// JSON object per news item) and validates it. Throws hml::Error with
/// the offending line number on malformed input.
Corpus load_corpus(const std::filesystem::path& path);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Invariant check. Returns one human-readable violation per broken rule,
/// each naming the item and rule; empty means the corpus is valid.
std::vector<std::string> validate(const Corpus& corpus);

}  // namespace hml
