#include "expcp/critical_table.hpp"

#include <sstream>
#include <tuple>

#include "expcp/error.hpp"

namespace expcp {

bool operator<(const TableKey& a, const TableKey& b) {
    return std::tie(a.spec, a.sample_size, a.alpha) < std::tie(b.spec, b.sample_size, b.alpha);
}

void CriticalValueTable::insert(const TableKey& key, const TableEntry& entry) {
    if (!entries_.emplace(key, entry).second) {
        std::ostringstream msg;
        msg << "duplicate table entry (" << key.spec.label() << ", K=" << key.sample_size
            << ", alpha=" << key.alpha << ")";
        throw InputError(msg.str());
    }
}

void CriticalValueTable::insert_or_assign(const TableKey& key, const TableEntry& entry) {
    entries_.insert_or_assign(key, entry);
}

const TableEntry* CriticalValueTable::find(const TableKey& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

}  // namespace expcp
