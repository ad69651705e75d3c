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

#pragma once

#include <chrono>
#include <string>

namespace wtd {

/// Calendar date at day resolution. Weeks are Monday-anchored throughout.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::sys_days d) : days_(d) {}
    static Date from_ymd(int year, unsigned month, unsigned day);

    /// Parses "YYYY-MM-DD". Throws std::invalid_argument on malformed or
    /// non-existent dates.
    static Date from_iso(const std::string& s);
    std::string to_iso() const;

    int year() const;
    /// 1 = January .. 12 = December.
    int month() const;
    int day() const;
    /// 1 = Monday .. 7 = Sunday.
    int iso_weekday() const;
    bool is_monday() const { return iso_weekday() == 1; }

    /// Monday of the week containing this date.
    Date week_start() const;

    Date plus_days(long n) const { return Date(days_ + std::chrono::days{n}); }
    Date plus_weeks(long n) const { return plus_days(7 * n); }
    long days_until(Date other) const {
        return (other.days_ - days_).count();
    }

    friend bool operator==(Date a, Date b) { return a.days_ == b.days_; }
    friend auto operator<=>(Date a, Date b) { return a.days_ <=> b.days_; }

private:
    std::chrono::sys_days days_{};
};

}  // namespace wtd
