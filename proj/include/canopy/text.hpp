#ifndef CANOPY_TEXT_HPP
#define CANOPY_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace canopy::text {

/// Strip leading and trailing ASCII whitespace.
std::string trim(std::string_view s);

/// Lowercase ASCII letters plus the Azerbaijani Latin capitals that occur in
/// species and soil names (Ə Ç Ş Ğ İ Ö Ü). Other bytes pass through, so
/// diacritics are preserved.
std::string lower(std::string_view s);

/// Canonical label form: trimmed, lowercased, inner whitespace runs collapsed
/// to single spaces. Idempotent.
std::string normalize_label(std::string_view s);

/// Alphanumeric runs of the normalized form. Bytes >= 0x80 count as letters,
/// keeping multi-byte UTF-8 characters inside their token.
std::vector<std::string> tokens(std::string_view s);

} // namespace canopy::text

#endif
