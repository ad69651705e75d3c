// ----------------------------------------------------------------------------
// Copyright 2026 The wtdcast Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------

#include "wtd/date.hpp"

#include <cstdio>
#include <stdexcept>

namespace wtd {

namespace chr = std::chrono;

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok()) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "invalid date %04d-%02u-%02u", year,
                      month, day);
        throw std::invalid_argument(buf);
    }
    return Date(chr::sys_days{ymd});
}

Date Date::from_iso(const std::string& s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char trail = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &trail) != 3 ||
        s.size() != 10) {
        throw std::invalid_argument("expected YYYY-MM-DD, got '" + s + "'");
    }
    return from_ymd(y, m, d);
}

std::string Date::to_iso() const {
    const chr::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

int Date::year() const { return int(chr::year_month_day{days_}.year()); }

int Date::month() const {
    return int(unsigned(chr::year_month_day{days_}.month()));
}

int Date::day() const { return int(unsigned(chr::year_month_day{days_}.day())); }

int Date::iso_weekday() const {
    return int(chr::weekday{days_}.iso_encoding());
}

Date Date::week_start() const {
    return plus_days(-(iso_weekday() - 1));
}

}  // namespace wtd
