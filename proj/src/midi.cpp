#include "motif/midi.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>
#include <iterator>

namespace motif {
namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> bytes, size_t pos, size_t end) : bytes_(bytes), pos_(pos), end_(end) {}

  size_t pos() const { return pos_; }
  bool done() const { return pos_ >= end_; }

  uint8_t u8() {
    if (pos_ >= end_) throw ParseError("unexpected end of data", pos_);
    return bytes_[pos_++];
  }
  uint8_t peek() const {
    if (pos_ >= end_) throw ParseError("unexpected end of data", pos_);
    return bytes_[pos_];
  }
  uint32_t be(int n) {
    uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | u8();
    return v;
  }
  uint32_t vlq() {
    const size_t start = pos_;
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if (!(b & 0x80)) return v;
    }
    throw ParseError("variable-length quantity longer than 4 bytes", start);
  }
  void skip(size_t n) {
    if (end_ - pos_ < n) throw ParseError("chunk data runs past its end", pos_);
    pos_ += n;
  }
  std::string text(size_t n) {
    if (end_ - pos_ < n) throw ParseError("chunk data runs past its end", pos_);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_;
  size_t end_;
};

struct PendingNote {
  uint64_t tick;
  int velocity;
};

struct RawTrack {
  std::string name;
  std::vector<NoteEvent> notes;
};

struct TimeSignature {
  int numerator = 4;
  int denominator = 4;
  bool seen = false;
};

RawTrack parse_track(ByteReader& in, int division, int track_index, TimeSignature& time_sig, Warnings* warnings) {
  RawTrack track;
  uint64_t tick = 0;
  int running_status = -1;
  // (channel, pitch) -> FIFO of open notes
  std::map<std::pair<int, int>, std::deque<PendingNote>> open;

  auto close_note = [&](int channel, int pitch) {
    auto it = open.find({channel, pitch});
    if (it == open.end() || it->second.empty()) return;  // stray note-off
    const PendingNote start = it->second.front();
    it->second.pop_front();
    if (tick == start.tick) return;  // zero-length note carries no duration
    NoteEvent ev;
    ev.onset_beats = static_cast<double>(start.tick) / division;
    ev.duration_beats = static_cast<double>(tick - start.tick) / division;
    ev.pitch = pitch;
    ev.velocity = start.velocity;
    track.notes.push_back(ev);
  };

  while (!in.done()) {
    tick += in.vlq();
    const size_t event_pos = in.pos();
    int status = in.peek();
    if (status & 0x80) {
      in.u8();
    } else if (running_status < 0) {
      throw ParseError("data byte without running status", event_pos);
    } else {
      status = running_status;
    }

    if (status == 0xFF) {
      running_status = -1;
      const uint8_t type = in.u8();
      const uint32_t len = in.vlq();
      if (type == 0x2F) {
        in.skip(len);
        break;
      }
      if (type == 0x03) {
        track.name = in.text(len);
      } else if (type == 0x58 && len >= 2) {
        const int nn = in.u8();
        const int dd = in.u8();
        in.skip(len - 2);
        if (!time_sig.seen) {
          time_sig = {nn, 1 << std::min(dd, 6), true};
        }
      } else {
        in.skip(len);
      }
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      running_status = -1;
      in.skip(in.vlq());
      continue;
    }
    if (status >= 0xF0) throw ParseError("unsupported system message", event_pos);

    running_status = status;
    const int kind = status & 0xF0;
    const int channel = status & 0x0F;
    const int data_bytes = (kind == 0xC0 || kind == 0xD0) ? 1 : 2;
    const int d1 = in.u8();
    const int d2 = data_bytes == 2 ? in.u8() : 0;
    if ((d1 | d2) & 0x80) throw ParseError("data byte with high bit set", event_pos);

    if (kind == 0x90 && d2 > 0) {
      open[{channel, d1}].push_back({tick, d2});
    } else if (kind == 0x80 || (kind == 0x90 && d2 == 0)) {
      close_note(channel, d1);
    }
  }

  for (const auto& [key, pending] : open) {
    for (size_t i = 0; i < pending.size(); ++i) {
      warn(warnings, "track " + std::to_string(track_index) + ": unmatched note-on for pitch " +
                         std::to_string(key.second) + " dropped");
    }
  }
  std::stable_sort(track.notes.begin(), track.notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
    return a.onset_beats < b.onset_beats || (a.onset_beats == b.onset_beats && a.pitch < b.pitch);
  });
  return track;
}

}  // namespace

TrackRole assign_role(const std::string& track_name, const MidiParseOptions& options) {
  const std::string name = upper(track_name);
  for (const auto& [key, role] : options.role_by_name) {
    if (upper(key) == name) return role;
  }
  if (name.find("MELODY") != std::string::npos || name.find("BRIDGE") != std::string::npos) return TrackRole::Melody;
  if (name.find("LABEL") != std::string::npos || name.find("MOTIF") != std::string::npos) return TrackRole::Label;
  return options.default_role;
}

Song parse_midi(std::span<const uint8_t> bytes, const MidiParseOptions& options, Warnings* warnings) {
  ByteReader header(bytes, 0, bytes.size());
  if (bytes.size() < 14) throw ParseError("truncated header", bytes.size());
  if (header.text(4) != "MThd") throw ParseError("missing MThd signature", 0);
  const uint32_t header_len = header.be(4);
  if (header_len < 6) throw ParseError("header chunk too short", 4);
  const uint32_t format = header.be(2);
  const uint32_t ntracks = header.be(2);
  const uint32_t division = header.be(2);
  if (format > 2) throw ParseError("unknown SMF format " + std::to_string(format), 8);
  if (division & 0x8000) throw ParseError("SMPTE time division is not supported", 12);
  if (division == 0) throw ParseError("zero ticks per quarter note", 12);

  size_t pos = 8 + header_len;
  if (pos > bytes.size()) throw ParseError("truncated header", bytes.size());

  Song song;
  song.song_id = options.song_id;
  TimeSignature time_sig;
  uint32_t parsed = 0;
  while (parsed < ntracks) {
    if (bytes.size() - pos < 8) throw ParseError("missing track chunk " + std::to_string(parsed), pos);
    ByteReader chunk_header(bytes, pos, bytes.size());
    const std::string type = chunk_header.text(4);
    const uint32_t len = chunk_header.be(4);
    const size_t body = pos + 8;
    if (bytes.size() - body < len) throw ParseError("chunk '" + type + "' runs past end of file", pos);
    if (type == "MTrk") {
      ByteReader in(bytes, body, body + len);
      RawTrack raw = parse_track(in, static_cast<int>(division), static_cast<int>(parsed), time_sig, warnings);
      if (!raw.notes.empty()) {
        Track track;
        track.name = raw.name.empty() ? "track" + std::to_string(parsed) : raw.name;
        track.role = assign_role(raw.name, options);
        for (auto& n : raw.notes) n.track_id = track.name;
        track.notes = std::move(raw.notes);
        song.tracks.push_back(std::move(track));
      }
      ++parsed;
    }
    pos = body + len;
  }

  const double quarter_beats = time_sig.numerator * 4.0 / time_sig.denominator;
  song.beats_per_bar = std::max(1, static_cast<int>(std::lround(quarter_beats)));
  if (std::abs(quarter_beats - song.beats_per_bar) > 1e-9) {
    warn(warnings, "time signature " + std::to_string(time_sig.numerator) + "/" +
                       std::to_string(time_sig.denominator) + " rounded to " + std::to_string(song.beats_per_bar) +
                       " beats per bar");
  }
  return song;
}

Song parse_midi_file(const std::filesystem::path& path, MidiParseOptions options, Warnings* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (options.song_id.empty()) options.song_id = path.stem().string();
  return parse_midi(bytes, options, warnings);
}

namespace {

void put_be(std::vector<uint8_t>& out, uint32_t v, int n) {
  for (int i = n - 1; i >= 0; --i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_vlq(std::vector<uint8_t>& out, uint32_t v) {
  uint8_t buf[4];
  int n = 0;
  buf[n++] = v & 0x7F;
  while (v >>= 7) buf[n++] = static_cast<uint8_t>((v & 0x7F) | 0x80);
  while (n > 0) out.push_back(buf[--n]);
}

void put_chunk(std::vector<uint8_t>& out, const char* type, const std::vector<uint8_t>& body) {
  out.insert(out.end(), type, type + 4);
  put_be(out, static_cast<uint32_t>(body.size()), 4);
  out.insert(out.end(), body.begin(), body.end());
}

}  // namespace

std::vector<uint8_t> write_midi(const Song& song, int ticks_per_beat) {
  std::vector<uint8_t> out;
  out.insert(out.end(), {'M', 'T', 'h', 'd'});
  put_be(out, 6, 4);
  put_be(out, 1, 2);
  put_be(out, static_cast<uint32_t>(song.tracks.size() + 1), 2);
  put_be(out, static_cast<uint32_t>(ticks_per_beat), 2);

  std::vector<uint8_t> conductor;
  put_vlq(conductor, 0);
  conductor.insert(conductor.end(), {0xFF, 0x58, 0x04, static_cast<uint8_t>(song.beats_per_bar), 0x02, 0x18, 0x08});
  put_vlq(conductor, 0);
  conductor.insert(conductor.end(), {0xFF, 0x2F, 0x00});
  put_chunk(out, "MTrk", conductor);

  for (const auto& track : song.tracks) {
    struct Ev {
      uint32_t tick;
      int order;  // note-offs sort before note-ons at the same tick
      uint8_t status, d1, d2;
    };
    std::vector<Ev> events;
    for (const auto& n : track.notes) {
      const auto on = static_cast<uint32_t>(std::lround(n.onset_beats * ticks_per_beat));
      const auto off = static_cast<uint32_t>(std::lround((n.onset_beats + n.duration_beats) * ticks_per_beat));
      const auto vel = static_cast<uint8_t>(n.velocity.value_or(80));
      events.push_back({on, 1, 0x90, static_cast<uint8_t>(n.pitch), vel});
      events.push_back({off, 0, 0x80, static_cast<uint8_t>(n.pitch), 0});
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Ev& a, const Ev& b) { return a.tick < b.tick || (a.tick == b.tick && a.order < b.order); });
    std::vector<uint8_t> body;
    put_vlq(body, 0);
    body.insert(body.end(), {0xFF, 0x03});
    put_vlq(body, static_cast<uint32_t>(track.name.size()));
    body.insert(body.end(), track.name.begin(), track.name.end());
    uint32_t last = 0;
    for (const auto& e : events) {
      put_vlq(body, e.tick - last);
      last = e.tick;
      body.insert(body.end(), {e.status, e.d1, e.d2});
    }
    put_vlq(body, 0);
    body.insert(body.end(), {0xFF, 0x2F, 0x00});
    put_chunk(out, "MTrk", body);
  }
  return out;
}

}  // namespace motif
