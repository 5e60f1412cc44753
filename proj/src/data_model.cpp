#include "txtree/data_model.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace txtree {

namespace {

auto split(const std::string& line) -> std::vector<std::string> {
  auto fields = std::vector<std::string>{};
  auto field = std::string{};
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

auto parse_int(const std::string& text, const std::filesystem::path& path, int line) -> int {
  auto value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Parse_error{path.string() + ":" + std::to_string(line) + ": expected integer, got '" +
                      text + "'"};
  }
  return value;
}

void expect_header(const Csv_table& t, const std::vector<std::string>& names,
                   const std::filesystem::path& path) {
  if (t.header != names) {
    auto joined = std::string{};
    for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
    throw Parse_error{path.string() + ": expected header '" + joined + "'"};
  }
}

void expect_width(const Csv_table& t, size_t row, size_t width, const std::filesystem::path& path) {
  if (t.rows[row].size() != width) {
    throw Parse_error{path.string() + ":" + std::to_string(t.line_numbers[row]) + ": expected " +
                      std::to_string(width) + " fields, got " +
                      std::to_string(t.rows[row].size())};
  }
}

}  // namespace

auto read_csv(const std::filesystem::path& path) -> Csv_table {
  auto in = std::ifstream{path};
  if (!in) throw Parse_error{"cannot open " + path.string()};
  auto table = Csv_table{};
  auto line = std::string{};
  auto line_no = 0;
  auto have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      table.header = split(line);
      have_header = true;
    } else {
      table.rows.push_back(split(line));
      table.line_numbers.push_back(line_no);
    }
  }
  if (!have_header) throw Parse_error{path.string() + ": missing header row"};
  return table;
}

void Dataset::finalize() {
  patient_index.clear();
  for (auto j = 0; j < num_patients(); ++j) {
    auto& e = episodes[j];
    if (!patient_index.emplace(e.patient_id, j).second) {
      throw Validation_error{"duplicate patient_id '" + e.patient_id + "'"};
    }
    if (e.admit_day > e.discharge_day) {
      throw Validation_error{"patient '" + e.patient_id + "': admit_day after discharge_day"};
    }
    std::stable_sort(e.screens.begin(), e.screens.end(),
                     [](const Screen& a, const Screen& b) { return a.day < b.day; });
    for (const auto& s : e.screens) {
      if (!e.present(s.day)) {
        throw Validation_error{"patient '" + e.patient_id + "': screen on day " +
                               std::to_string(s.day) + " outside episode [" +
                               std::to_string(e.admit_day) + "," +
                               std::to_string(e.discharge_day) + "]"};
      }
    }
  }

  if (distances.size() != num_isolates()) {
    throw Validation_error{"distance matrix has dimension " + std::to_string(distances.size()) +
                           " but there are " + std::to_string(num_isolates()) + " isolates"};
  }
  for (auto a = 0; a < distances.size(); ++a) {
    if (distances.at(a, a) != 0) {
      throw Validation_error{"isolate '" + isolates[a].isolate_id + "': nonzero self-distance"};
    }
    for (auto b = a + 1; b < distances.size(); ++b) {
      if (distances.at(a, b) != distances.at(b, a)) {
        throw Validation_error{"distance matrix asymmetric at ('" + isolates[a].isolate_id +
                               "','" + isolates[b].isolate_id + "')"};
      }
      if (distances.at(a, b) < 0) {
        throw Validation_error{"negative distance at ('" + isolates[a].isolate_id + "','" +
                               isolates[b].isolate_id + "')"};
      }
    }
  }

  first_positive_day.assign(num_patients(), kNoPositive);
  for (auto j = 0; j < num_patients(); ++j) {
    for (const auto& s : episodes[j].screens) {
      if (s.positive) {
        first_positive_day[j] = s.day;
        break;
      }
    }
  }

  isolates_of_patient.assign(num_patients(), {});
  auto isolate_ids = std::set<std::string>{};
  for (auto x = 0; x < num_isolates(); ++x) {
    const auto& iso = isolates[x];
    if (!isolate_ids.insert(iso.isolate_id).second) {
      throw Validation_error{"duplicate isolate_id '" + iso.isolate_id + "'"};
    }
    if (iso.host < 0 || iso.host >= num_patients()) {
      throw Validation_error{"isolate '" + iso.isolate_id + "' references unknown patient"};
    }
    const auto& screens = episodes[iso.host].screens;
    auto matches = std::any_of(screens.begin(), screens.end(), [&](const Screen& s) {
      return s.positive && s.day == iso.sample_day;
    });
    if (!matches) {
      throw Validation_error{"isolate '" + iso.isolate_id + "' sampled on day " +
                             std::to_string(iso.sample_day) +
                             " which is not a positive screen of its host"};
    }
    isolates_of_patient[iso.host].push_back(x);
  }

  if (episodes.empty()) {
    first_day = 0;
    last_day = -1;
  } else {
    first_day = std::numeric_limits<int>::max();
    last_day = std::numeric_limits<int>::min();
    for (const auto& e : episodes) {
      first_day = std::min(first_day, e.admit_day);
      last_day = std::max(last_day, e.discharge_day);
    }
  }
}

auto load_dataset(const std::filesystem::path& episodes_path,
                  const std::filesystem::path& screens_path,
                  const std::filesystem::path& isolates_path,
                  const std::filesystem::path& distances_path) -> Dataset {
  auto d = Dataset{};

  auto episodes = read_csv(episodes_path);
  expect_header(episodes, {"patient_id", "admit_day", "discharge_day"}, episodes_path);
  auto index = std::unordered_map<std::string, Patient>{};
  for (size_t r = 0; r < episodes.rows.size(); ++r) {
    expect_width(episodes, r, 3, episodes_path);
    const auto& row = episodes.rows[r];
    auto line = episodes.line_numbers[r];
    auto e = EpisodeRecord{row[0], parse_int(row[1], episodes_path, line),
                           parse_int(row[2], episodes_path, line), {}};
    if (!index.emplace(e.patient_id, static_cast<Patient>(d.episodes.size())).second) {
      throw Validation_error{episodes_path.string() + ":" + std::to_string(line) +
                             ": duplicate patient_id '" + e.patient_id + "'"};
    }
    d.episodes.push_back(std::move(e));
  }

  auto resolve = [&](const std::string& id, const std::filesystem::path& path, int line) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw Validation_error{path.string() + ":" + std::to_string(line) + ": unknown patient_id '" +
                             id + "'"};
    }
    return it->second;
  };

  auto screens = read_csv(screens_path);
  expect_header(screens, {"patient_id", "day", "result"}, screens_path);
  for (size_t r = 0; r < screens.rows.size(); ++r) {
    expect_width(screens, r, 3, screens_path);
    const auto& row = screens.rows[r];
    auto line = screens.line_numbers[r];
    auto j = resolve(row[0], screens_path, line);
    auto day = parse_int(row[1], screens_path, line);
    if (row[2] != "pos" && row[2] != "neg") {
      throw Parse_error{screens_path.string() + ":" + std::to_string(line) +
                        ": result must be pos or neg, got '" + row[2] + "'"};
    }
    d.episodes[j].screens.push_back({day, row[2] == "pos"});
  }

  auto isolates = read_csv(isolates_path);
  expect_header(isolates, {"isolate_id", "patient_id", "day"}, isolates_path);
  auto isolate_index = std::unordered_map<std::string, int>{};
  for (size_t r = 0; r < isolates.rows.size(); ++r) {
    expect_width(isolates, r, 3, isolates_path);
    const auto& row = isolates.rows[r];
    auto line = isolates.line_numbers[r];
    auto iso = IsolateRecord{row[0], resolve(row[1], isolates_path, line),
                             parse_int(row[2], isolates_path, line)};
    if (!isolate_index.emplace(iso.isolate_id, static_cast<int>(d.isolates.size())).second) {
      throw Validation_error{isolates_path.string() + ":" + std::to_string(line) +
                             ": duplicate isolate_id '" + iso.isolate_id + "'"};
    }
    d.isolates.push_back(std::move(iso));
  }

  auto n_s = static_cast<int>(d.isolates.size());
  d.distances = DistanceMatrix{n_s};
  auto dist = read_csv(distances_path);
  auto resolve_isolate = [&](const std::string& id, int line) {
    auto it = isolate_index.find(id);
    if (it == isolate_index.end()) {
      throw Validation_error{distances_path.string() + ":" + std::to_string(line) +
                             ": unknown isolate_id '" + id + "'"};
    }
    return it->second;
  };

  if (!dist.header.empty() && dist.header[0] == "isolate_a") {
    expect_header(dist, {"isolate_a", "isolate_b", "snps"}, distances_path);
    auto seen = std::set<std::pair<int, int>>{};
    for (size_t r = 0; r < dist.rows.size(); ++r) {
      expect_width(dist, r, 3, distances_path);
      const auto& row = dist.rows[r];
      auto line = dist.line_numbers[r];
      auto a = resolve_isolate(row[0], line);
      auto b = resolve_isolate(row[1], line);
      auto snps = parse_int(row[2], distances_path, line);
      if (a == b) {
        throw Validation_error{distances_path.string() + ":" + std::to_string(line) +
                               ": self pair '" + row[0] + "'"};
      }
      if (snps < 0) {
        throw Validation_error{distances_path.string() + ":" + std::to_string(line) +
                               ": negative distance"};
      }
      if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
        throw Validation_error{distances_path.string() + ":" + std::to_string(line) + ": pair ('" +
                               row[0] + "','" + row[1] + "') listed twice"};
      }
      d.distances.set(a, b, snps);
    }
    auto expected = static_cast<size_t>(n_s) * (n_s - 1) / 2;
    if (seen.size() != expected) {
      throw Validation_error{distances_path.string() + ": sparse distances list " +
                             std::to_string(seen.size()) + " pairs, expected " +
                             std::to_string(expected)};
    }
  } else {
    if (dist.header.empty() || dist.header[0] != "isolate_id" ||
        dist.header.size() != static_cast<size_t>(n_s) + 1) {
      throw Parse_error{distances_path.string() +
                        ": dense matrix header must be isolate_id followed by every isolate"};
    }
    auto columns = std::vector<int>{};
    for (size_t c = 1; c < dist.header.size(); ++c) columns.push_back(resolve_isolate(dist.header[c], 1));
    if (dist.rows.size() != static_cast<size_t>(n_s)) {
      throw Parse_error{distances_path.string() + ": dense matrix must have one row per isolate"};
    }
    // Fill a raw grid first so asymmetry is detected rather than overwritten.
    auto raw = std::vector<std::vector<int>>(n_s, std::vector<int>(n_s, 0));
    auto rows_seen = std::set<int>{};
    for (size_t r = 0; r < dist.rows.size(); ++r) {
      expect_width(dist, r, static_cast<size_t>(n_s) + 1, distances_path);
      const auto& row = dist.rows[r];
      auto line = dist.line_numbers[r];
      auto a = resolve_isolate(row[0], line);
      if (!rows_seen.insert(a).second) {
        throw Validation_error{distances_path.string() + ":" + std::to_string(line) +
                               ": duplicate row '" + row[0] + "'"};
      }
      for (auto c = 0; c < n_s; ++c) raw[a][columns[c]] = parse_int(row[c + 1], distances_path, line);
    }
    for (auto a = 0; a < n_s; ++a) {
      if (raw[a][a] != 0) {
        throw Validation_error{"isolate '" + d.isolates[a].isolate_id + "': nonzero self-distance"};
      }
      for (auto b = a + 1; b < n_s; ++b) {
        if (raw[a][b] != raw[b][a]) {
          throw Validation_error{"distance matrix asymmetric at ('" + d.isolates[a].isolate_id +
                                 "','" + d.isolates[b].isolate_id + "')"};
        }
        if (raw[a][b] < 0) {
          throw Validation_error{"negative distance at ('" + d.isolates[a].isolate_id + "','" +
                                 d.isolates[b].isolate_id + "')"};
        }
        d.distances.set(a, b, raw[a][b]);
      }
    }
  }

  d.finalize();
  return d;
}

auto load_dataset_dir(const std::filesystem::path& dir) -> Dataset {
  return load_dataset(dir / "episodes.csv", dir / "screens.csv", dir / "isolates.csv",
                      dir / "distances.csv");
}

void write_dataset(const Dataset& d, const std::filesystem::path& dir, Distance_layout layout) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    auto out = std::ofstream{dir / name};
    if (!out) throw std::runtime_error{"cannot write " + (dir / name).string()};
    return out;
  };

  {
    auto out = open("episodes.csv");
    out << "patient_id,admit_day,discharge_day\n";
    for (const auto& e : d.episodes) {
      out << e.patient_id << ',' << e.admit_day << ',' << e.discharge_day << '\n';
    }
  }
  {
    auto out = open("screens.csv");
    out << "patient_id,day,result\n";
    for (const auto& e : d.episodes) {
      for (const auto& s : e.screens) {
        out << e.patient_id << ',' << s.day << ',' << (s.positive ? "pos" : "neg") << '\n';
      }
    }
  }
  {
    auto out = open("isolates.csv");
    out << "isolate_id,patient_id,day\n";
    for (const auto& iso : d.isolates) {
      out << iso.isolate_id << ',' << d.episodes[iso.host].patient_id << ',' << iso.sample_day
          << '\n';
    }
  }
  {
    auto out = open("distances.csv");
    auto n_s = d.num_isolates();
    if (layout == Distance_layout::sparse) {
      out << "isolate_a,isolate_b,snps\n";
      for (auto a = 0; a < n_s; ++a) {
        for (auto b = a + 1; b < n_s; ++b) {
          out << d.isolates[a].isolate_id << ',' << d.isolates[b].isolate_id << ','
              << d.distances.at(a, b) << '\n';
        }
      }
    } else {
      out << "isolate_id";
      for (const auto& iso : d.isolates) out << ',' << iso.isolate_id;
      out << '\n';
      for (auto a = 0; a < n_s; ++a) {
        out << d.isolates[a].isolate_id;
        for (auto b = 0; b < n_s; ++b) out << ',' << d.distances.at(a, b);
        out << '\n';
      }
    }
  }
}

auto observed_positive_set(const Dataset& d) -> std::vector<std::string> {
  auto ids = std::vector<std::string>{};
  for (auto j = 0; j < d.num_patients(); ++j) {
    if (d.has_positive(j)) ids.push_back(d.episodes[j].patient_id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace txtree
