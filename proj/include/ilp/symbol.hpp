#pragma once

#include <charconv>
#include <compare>
#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_set>

namespace ilp {

namespace detail {

// Node-based set: element addresses are stable for the life of the process.
inline const std::string& intern(std::string_view s) {
    static std::mutex mu;
    static std::unordered_set<std::string> pool;
    std::lock_guard lock(mu);
    return *pool.emplace(s).first;
}

inline bool parse_integer(std::string_view s, long long& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

/// Interned name. Equality is pointer identity; ordering is "natural":
/// integers numerically and before other names, everything else lexicographic.
class Symbol {
public:
    Symbol() = default;
    explicit Symbol(std::string_view s) : p_(&detail::intern(s)) {}

    std::string_view str() const { return p_ ? std::string_view(*p_) : std::string_view(); }
    bool valid() const { return p_ != nullptr; }
    const void* id() const { return p_; }

    friend bool operator==(Symbol a, Symbol b) { return a.p_ == b.p_; }

    friend std::strong_ordering operator<=>(Symbol a, Symbol b) {
        if (a.p_ == b.p_) return std::strong_ordering::equal;
        long long x = 0, y = 0;
        const bool xi = detail::parse_integer(a.str(), x);
        const bool yi = detail::parse_integer(b.str(), y);
        if (xi && yi && x != y) return x <=> y;
        if (xi != yi) return xi ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.str().compare(b.str()) <=> 0;
    }

private:
    const std::string* p_ = nullptr;
};

}  // namespace ilp

template <>
struct std::hash<ilp::Symbol> {
    std::size_t operator()(ilp::Symbol s) const noexcept { return std::hash<const void*>{}(s.id()); }
};
