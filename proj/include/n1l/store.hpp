#ifndef N1L_STORE_HPP
#define N1L_STORE_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "n1l/bits.hpp"
#include "n1l/config.hpp"
#include "n1l/error.hpp"

namespace n1l {

/// A sorted, packed list of canonical keys for one stage.
class KeyArchive {
 public:
  KeyArchive() = default;
  KeyArchive(int rows, int max_cols) : rows_(rows), max_cols_(max_cols) {}

  static constexpr std::string_view kMagic = "N1LARC01";

  int rows() const { return rows_; }
  int max_cols() const { return max_cols_; }
  std::size_t size() const { return offsets_.size() - 1; }
  bool empty() const { return size() == 0; }
  std::string_view operator[](std::size_t i) const {
    return std::string_view(bytes_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  /// Keys must be appended in strictly ascending order.
  void append(std::string_view key) {
    bytes_.insert(bytes_.end(), key.begin(), key.end());
    offsets_.push_back(bytes_.size());
  }

  void reserve(std::size_t keys, std::size_t bytes) {
    offsets_.reserve(keys + 1);
    bytes_.reserve(bytes);
  }

  std::size_t memory_bytes() const { return bytes_.capacity() + offsets_.capacity() * sizeof(std::uint64_t); }

  /// Keys whose column count satisfies keep, in the same order.
  KeyArchive filtered(const std::function<bool(int cols)>& keep) const {
    KeyArchive out(rows_, max_cols_);
    for (std::size_t i = 0; i < size(); ++i)
      if (keep(key_cols((*this)[i]))) out.append((*this)[i]);
    return out;
  }

  /// Distinct column counts present, ascending.
  std::vector<int> column_counts() const {
    std::array<bool, kMaxCols + 1> seen{};
    for (std::size_t i = 0; i < size(); ++i) seen[key_cols((*this)[i])] = true;
    std::vector<int> out;
    for (int c = 0; c <= kMaxCols; ++c)
      if (seen[c]) out.push_back(c);
    return out;
  }

  /// 16-byte header (magic, rows and max columns as little-endian u32), then
  /// one record per key: little-endian u16 length followed by the key bytes.
  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
    put_u32(out, static_cast<std::uint32_t>(rows_));
    put_u32(out, static_cast<std::uint32_t>(max_cols_));
    for (std::size_t i = 0; i < size(); ++i) {
      auto key = (*this)[i];
      const unsigned char len[2] = {static_cast<unsigned char>(key.size() & 0xFF),
                                    static_cast<unsigned char>(key.size() >> 8)};
      out.write(reinterpret_cast<const char*>(len), 2);
      out.write(key.data(), static_cast<std::streamsize>(key.size()));
    }
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
  }

  static KeyArchive read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string_view(magic, 8) != kMagic) throw Error(ErrorCode::Io, path + ": bad archive magic");
    const auto rows = get_u32(in), max_cols = get_u32(in);
    if (!in) throw Error(ErrorCode::Io, path + ": truncated header");
    KeyArchive archive(static_cast<int>(rows), static_cast<int>(max_cols));
    std::string key;
    while (true) {
      unsigned char len[2];
      in.read(reinterpret_cast<char*>(len), 2);
      if (in.gcount() == 0) break;
      if (in.gcount() != 2) throw Error(ErrorCode::Io, path + ": truncated record");
      key.resize(len[0] | (len[1] << 8));
      in.read(key.data(), static_cast<std::streamsize>(key.size()));
      if (!in) throw Error(ErrorCode::Io, path + ": truncated record");
      archive.append(key);
    }
    return archive;
  }

  friend bool operator==(const KeyArchive& a, const KeyArchive& b) {
    return a.rows_ == b.rows_ && a.max_cols_ == b.max_cols_ && a.bytes_ == b.bytes_ && a.offsets_ == b.offsets_;
  }

 private:
  static void put_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  }
  static std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4] = {};
    in.read(reinterpret_cast<char*>(b), 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  int rows_ = 0;
  int max_cols_ = 0;
  std::vector<char> bytes_;
  std::vector<std::uint64_t> offsets_{0};
};

/// Concurrent insert-if-absent set of keys for the stage being built.
///
/// Keys live in per-shard byte arenas (one length byte, then the key); each
/// shard is an open-addressing table of arena offsets tagged with the high
/// hash bits. Full keys are compared, so hash collisions never merge
/// distinct keys.
class StageStore {
 public:
  explicit StageStore(std::size_t memory_limit_bytes = std::size_t{4} << 30) : limit_(memory_limit_bytes) {}

  StageStore(const StageStore&) = delete;
  StageStore& operator=(const StageStore&) = delete;

  /// Returns true if the key was not present. Throws StageOverflow when the
  /// memory limit would be exceeded.
  bool insert(std::string_view key) {
    if (key.empty() || key.size() > 255) throw Error(ErrorCode::InvalidArgument, "key length must be 1..255");
    const std::uint64_t h = std::hash<std::string_view>{}(key);
    Shard& shard = shards_[h & (kShards - 1)];
    std::lock_guard lock(shard.mu);
    if (shard.slots.empty() || (shard.count + 1) * 2 > shard.slots.size()) grow(shard);
    const std::uint64_t tag = (h >> 40) << kTagShift;
    std::size_t mask = shard.slots.size() - 1;
    for (std::size_t i = (h >> kShardBits) & mask;; i = (i + 1) & mask) {
      const std::uint64_t slot = shard.slots[i];
      if (slot == 0) {
        const std::size_t offset = shard.arena.size();
        if (shard.arena.capacity() < offset + key.size() + 1) reserve_arena(shard, offset + key.size() + 1);
        shard.arena.push_back(static_cast<char>(key.size()));
        shard.arena.insert(shard.arena.end(), key.begin(), key.end());
        shard.slots[i] = tag | (offset + 1);
        ++shard.count;
        ++shard.per_cols[key_cols(key)];
        return true;
      }
      if ((slot & ~kOffsetMask) == tag && stored_key(shard, slot) == key) return false;
    }
  }

  bool contains(std::string_view key) const {
    const std::uint64_t h = std::hash<std::string_view>{}(key);
    const Shard& shard = shards_[h & (kShards - 1)];
    std::lock_guard lock(shard.mu);
    if (shard.slots.empty()) return false;
    const std::uint64_t tag = (h >> 40) << kTagShift;
    std::size_t mask = shard.slots.size() - 1;
    for (std::size_t i = (h >> kShardBits) & mask;; i = (i + 1) & mask) {
      const std::uint64_t slot = shard.slots[i];
      if (slot == 0) return false;
      if ((slot & ~kOffsetMask) == tag && stored_key(shard, slot) == key) return true;
    }
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : shards_) n += s.count;
    return n;
  }

  /// Number of stored keys per column count.
  std::array<std::uint64_t, kMaxCols + 1> counts_by_cols() const {
    std::array<std::uint64_t, kMaxCols + 1> out{};
    for (const auto& s : shards_)
      for (int c = 0; c <= kMaxCols; ++c) out[c] += s.per_cols[c];
    return out;
  }

  std::size_t memory_bytes() const { return used_.load(); }

  /// Sorted archive of the stored keys whose column count satisfies keep.
  KeyArchive pack(int rows, int max_cols, const std::function<bool(int)>& keep = {}) const {
    std::vector<std::string_view> keys;
    std::size_t bytes = 0;
    for (const auto& s : shards_)
      for (std::size_t off = 0; off < s.arena.size();) {
        const std::size_t len = static_cast<unsigned char>(s.arena[off]);
        std::string_view key(s.arena.data() + off + 1, len);
        if (!keep || keep(key_cols(key))) {
          keys.push_back(key);
          bytes += len;
        }
        off += len + 1;
      }
    std::sort(keys.begin(), keys.end());
    KeyArchive out(rows, max_cols);
    out.reserve(keys.size(), bytes);
    for (auto k : keys) out.append(k);
    return out;
  }

  void clear() {
    for (auto& s : shards_) {
      std::vector<char>().swap(s.arena);
      std::vector<std::uint64_t>().swap(s.slots);
      s.count = 0;
      s.per_cols.fill(0);
    }
    used_ = 0;
  }

 private:
  static constexpr int kShardBits = 6;
  static constexpr std::size_t kShards = std::size_t{1} << kShardBits;
  static constexpr int kTagShift = 40;
  static constexpr std::uint64_t kOffsetMask = (std::uint64_t{1} << kTagShift) - 1;

  struct Shard {
    mutable std::mutex mu;
    std::vector<char> arena;
    std::vector<std::uint64_t> slots;
    std::size_t count = 0;
    std::array<std::uint64_t, kMaxCols + 1> per_cols{};
  };

  static std::string_view stored_key(const Shard& shard, std::uint64_t slot) {
    const std::size_t off = (slot & kOffsetMask) - 1;
    return std::string_view(shard.arena.data() + off + 1, static_cast<unsigned char>(shard.arena[off]));
  }

  void charge(std::size_t old_bytes, std::size_t new_bytes) {
    const std::size_t now = used_.fetch_add(new_bytes - old_bytes) + new_bytes - old_bytes;
    if (now > limit_) throw Error(ErrorCode::StageOverflow, "stage store exceeded its memory limit");
  }

  void reserve_arena(Shard& shard, std::size_t need) {
    const std::size_t old_cap = shard.arena.capacity();
    const std::size_t cap = std::max({need, old_cap + old_cap / 2, std::size_t{4096}});
    // Both buffers coexist while reallocating.
    charge(old_cap, old_cap + cap);
    shard.arena.reserve(cap);
    charge(old_cap + cap, cap);
  }

  void grow(Shard& shard) {
    const std::size_t old_size = shard.slots.size();
    const std::size_t new_size = old_size == 0 ? 1024 : old_size * 2;
    charge(old_size * 8, (old_size + new_size) * 8);
    std::vector<std::uint64_t> slots(new_size, 0);
    const std::size_t mask = new_size - 1;
    for (std::uint64_t slot : shard.slots) {
      if (slot == 0) continue;
      const std::uint64_t h = std::hash<std::string_view>{}(stored_key(shard, slot));
      std::size_t i = (h >> kShardBits) & mask;
      while (slots[i] != 0) i = (i + 1) & mask;
      slots[i] = slot;
    }
    shard.slots.swap(slots);
    charge((old_size + new_size) * 8, new_size * 8);
  }

  std::size_t limit_;
  std::atomic<std::size_t> used_{0};
  std::array<Shard, kShards> shards_;
};

}  // namespace n1l

#endif  // N1L_STORE_HPP
