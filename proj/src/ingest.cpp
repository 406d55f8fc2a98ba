#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "demandfc/error.hpp"
#include "demandfc/pipeline.hpp"

namespace demandfc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::optional<double> parse_double(const std::string& text) {
    const auto t = trim(text);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

bool read_digits(const std::string& s, std::size_t& pos, std::size_t count, int& out) {
    if (pos + count > s.size()) return false;
    out = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = s[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        out = out * 10 + (c - '0');
    }
    pos += count;
    return true;
}

std::optional<std::int64_t> parse_iso8601(const std::string& s) {
    std::size_t pos = 0;
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!read_digits(s, pos, 4, year) || pos >= s.size() || s[pos++] != '-') return std::nullopt;
    if (!read_digits(s, pos, 2, month) || pos >= s.size() || s[pos++] != '-') return std::nullopt;
    if (!read_digits(s, pos, 2, day)) return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) return std::nullopt;
    std::int64_t offset = 0;

    if (pos < s.size()) {
        if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
        ++pos;
        if (!read_digits(s, pos, 2, hour) || pos >= s.size() || s[pos++] != ':') return std::nullopt;
        if (!read_digits(s, pos, 2, minute)) return std::nullopt;
        if (pos < s.size() && s[pos] == ':') {
            ++pos;
            if (!read_digits(s, pos, 2, second)) return std::nullopt;
            if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
                ++pos;
                const std::size_t start = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                if (pos == start) return std::nullopt;
            }
        }
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
        if (pos < s.size()) {
            if (s[pos] == 'Z') {
                ++pos;
            } else if (s[pos] == '+' || s[pos] == '-') {
                const int sign = s[pos] == '-' ? -1 : 1;
                ++pos;
                int oh = 0, om = 0;
                if (!read_digits(s, pos, 2, oh)) return std::nullopt;
                if (pos < s.size() && s[pos] == ':') ++pos;
                if (pos < s.size() && !read_digits(s, pos, 2, om)) return std::nullopt;
                offset = sign * (oh * 3600 + om * 60);
            }
        }
        if (pos != s.size()) return std::nullopt;
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(const std::string& text) {
    const auto t = trim(text);
    if (t.empty()) return std::nullopt;
    if (t.size() >= 10 && t[4] == '-' && t[7] == '-') return parse_iso8601(t);
    const auto v = parse_double(t);
    if (!v || !std::isfinite(*v)) return std::nullopt;
    return static_cast<std::int64_t>(std::floor(*v));
}

std::vector<TraceRecord> parse_trace(const std::string& csv_text) {
    std::vector<TraceRecord> out;
    std::istringstream is(csv_text);
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split_fields(t);
        const bool first = !seen_content;
        seen_content = true;
        std::optional<std::int64_t> ts;
        std::optional<double> value;
        if (fields.size() == 2) {
            ts = parse_timestamp(fields[0]);
            value = parse_double(fields[1]);
        }
        if (!ts || !value) {
            if (first) continue;  // header row
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 'timestamp,value', got '" + t + "'");
        }
        if (!std::isfinite(*value)) {
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": value is not finite");
        }
        if (!out.empty() && *ts <= out.back().timestamp) {
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": timestamps must be strictly increasing");
        }
        out.push_back({*ts, *value});
    }
    if (out.empty()) fail(ErrorCode::Parse, "trace contains no records");
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<TraceRecord> read_trace(const std::string& path) {
    try {
        return parse_trace(read_text_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) fail(ErrorCode::Parse, path + ": " + e.what());
        throw;
    }
}

IngestResult aggregate(const std::vector<TraceRecord>& records, const IngestOptions& options) {
    if (records.empty()) fail(ErrorCode::InvalidArgument, "no records to aggregate");
    if (options.bucket_seconds <= 0) fail(ErrorCode::InvalidArgument, "bucket width must be positive");

    if (options.aggregation == Aggregation::None) {
        std::vector<double> values;
        values.reserve(records.size());
        for (const auto& r : records) values.push_back(r.value);
        const std::int64_t interval =
            records.size() > 1 ? records[1].timestamp - records[0].timestamp : options.bucket_seconds;
        return {Series(std::move(values), records.front().timestamp, interval), records.size(), 0};
    }

    const std::int64_t width = options.bucket_seconds;
    const std::int64_t first = floor_div(records.front().timestamp, width);
    const std::int64_t last = floor_div(records.back().timestamp, width);
    std::vector<double> values;
    std::size_t skipped = 0;
    std::size_t i = 0;
    for (std::int64_t b = first; b <= last; ++b) {
        double sum = 0.0;
        std::size_t count = 0;
        while (i < records.size() && floor_div(records[i].timestamp, width) == b) {
            sum += records[i].value;
            ++count;
            ++i;
        }
        if (count == 0) {
            if (!options.skip_empty) {
                fail(ErrorCode::InsufficientData,
                     "empty bucket starting at epoch " + std::to_string(b * width) + " (use skip_empty to drop it)");
            }
            ++skipped;
            continue;
        }
        values.push_back(sum / static_cast<double>(count));
    }
    return {Series(std::move(values), first * width, width), records.size(), skipped};
}

IngestResult ingest(const std::string& path, const IngestOptions& options) {
    return aggregate(read_trace(path), options);
}

std::string series_to_csv(const Series& s) {
    std::ostringstream os;
    os.precision(17);
    os << "timestamp,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << s.start_time() + static_cast<std::int64_t>(i) * s.interval() << ',' << s[i] << '\n';
    }
    return os.str();
}

}  // namespace demandfc
