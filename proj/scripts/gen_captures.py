#!/usr/bin/env python3
"""Writes the bundled pcap and flow-log fixtures under data/captures/.

Frames are built by hand with struct; when dpkt is importable every written
pcap is read back with it and summarised as a cross-check.
"""
import json
import os
import struct
import sys

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "captures")
BASE_TS = 1_700_000_000.0

ROUTER_MAC = "02:00:5e:00:00:01"
LOCK_MAC = "02:00:5e:10:00:0c"
SPEAKER_MAC = "02:00:5e:10:00:0a"
LIGHT_MAC = "02:00:5e:10:00:14"
STRAY_MAC = "02:00:5e:10:00:63"


def mac(text):
    return bytes(int(x, 16) for x in text.split(":"))


def ip(text):
    return bytes(int(x) for x in text.split("."))


def checksum(data):
    if len(data) % 2:
        data += b"\0"
    s = sum(struct.unpack("!%dH" % (len(data) // 2), data))
    s = (s >> 16) + (s & 0xFFFF)
    s += s >> 16
    return ~s & 0xFFFF


def ipv4(src, dst, proto, payload):
    total = 20 + len(payload)
    hdr = struct.pack("!BBHHHBBH4s4s", 0x45, 0, total, 0, 0x4000, 64, proto, 0, ip(src), ip(dst))
    hdr = hdr[:10] + struct.pack("!H", checksum(hdr)) + hdr[12:]
    return hdr + payload


def tcp(sport, dport, flags, data=b""):
    return struct.pack("!HHIIBBHHH", sport, dport, 1, 0, 5 << 4, flags, 65535, 0, 0) + data


def udp(sport, dport, data=b""):
    return struct.pack("!HHHH", sport, dport, 8 + len(data), 0) + data


def ether(src, dst, ethertype, payload):
    return mac(dst) + mac(src) + struct.pack("!H", ethertype) + payload


def frame(src_mac, dst_mac, src, dst, l4, proto):
    return ether(src_mac, dst_mac, 0x0800, ipv4(src, dst, proto, l4))


def write_pcap(path, packets):
    with open(path, "wb") as f:
        f.write(struct.pack("<IHHiIII", 0xA1B2C3D4, 2, 4, 0, 0, 65535, 1))
        for ts, data in packets:
            sec = int(ts)
            usec = int(round((ts - sec) * 1e6))
            f.write(struct.pack("<IIII", sec, usec, len(data), len(data)))
            f.write(data)


def sample():
    # One outbound TCP SYN from the smart speaker to an AWS address.
    syn = frame(SPEAKER_MAC, ROUTER_MAC, "192.168.1.10", "52.94.236.248", tcp(50432, 443, 0x02), 6)
    return [(BASE_TS, syn)]


def smart_lock():
    lock, cloud = "192.168.1.12", "3.210.5.5"
    t = BASE_TS + 100.0
    pkts = []
    # Episode 1: handshake and a short exchange.
    pkts.append((t, frame(LOCK_MAC, ROUTER_MAC, lock, cloud, tcp(51000, 443, 0x02), 6)))
    pkts.append((t + 0.04, frame(ROUTER_MAC, LOCK_MAC, cloud, lock, tcp(443, 51000, 0x12), 6)))
    pkts.append((t + 0.05, frame(LOCK_MAC, ROUTER_MAC, lock, cloud, tcp(51000, 443, 0x10), 6)))
    pkts.append((t + 0.10, frame(LOCK_MAC, ROUTER_MAC, lock, cloud, tcp(51000, 443, 0x18, b"x" * 517), 6)))
    pkts.append((t + 0.30, frame(ROUTER_MAC, LOCK_MAC, cloud, lock, tcp(443, 51000, 0x18, b"y" * 1200), 6)))
    # LAN-only chatter with the smart light: dropped.
    pkts.append((t + 1.0, frame(LOCK_MAC, LIGHT_MAC, lock, "192.168.1.20", udp(5353, 5353, b"m" * 40), 17)))
    # Unbound local host talking to the internet: unattributed.
    pkts.append((t + 2.0, frame(STRAY_MAC, ROUTER_MAC, "192.168.1.99", "142.250.1.1", udp(40000, 443, b"q" * 60), 17)))
    # ARP request: not IPv4, skipped.
    arp = struct.pack("!HHBBH6s4s6s4s", 1, 0x0800, 6, 4, 1, mac(LOCK_MAC), ip(lock), b"\0" * 6, ip("192.168.1.1"))
    pkts.append((t + 3.0, ether(LOCK_MAC, "ff:ff:ff:ff:ff:ff", 0x0806, arp)))
    # Episode 2 after the idle gap, inside the emit window: no second notification.
    pkts.append((t + 20.0, frame(LOCK_MAC, ROUTER_MAC, lock, cloud, tcp(51000, 443, 0x18, b"z" * 90), 6)))
    return pkts


def flowlog():
    rows = [
        {"ts": BASE_TS, "src": "192.168.1.10:50432", "dst": "52.94.236.248:443", "proto": "tcp", "bytes": 60},
        {"ts": BASE_TS + 5, "src": "52.94.236.248:443", "dst": "192.168.1.10:50432", "proto": "tcp", "bytes": 1500},
        {"ts": BASE_TS + 30, "src": "192.168.1.30:41000", "dst": "185.60.216.35:443", "proto": "tcp", "bytes": 300},
        {"ts": BASE_TS + 31, "src": "192.168.1.21:41001", "dst": "142.250.180.14:443", "proto": "udp", "bytes": 120},
    ]
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def cross_check(path):
    try:
        import dpkt
    except ImportError:
        return
    with open(path, "rb") as f:
        for ts, buf in dpkt.pcap.Reader(f):
            eth = dpkt.ethernet.Ethernet(buf)
            if not isinstance(eth.data, dpkt.ip.IP):
                print("  %.6f non-ip type=0x%04x" % (ts, eth.type))
                continue
            pkt = eth.data
            l4 = pkt.data
            sport = getattr(l4, "sport", None)
            dport = getattr(l4, "dport", None)
            print("  %.6f %s:%s -> %s:%s proto=%d len=%d" % (
                ts, ".".join(map(str, pkt.src)), sport, ".".join(map(str, pkt.dst)), dport, pkt.p, pkt.len))


def main():
    os.makedirs(OUT, exist_ok=True)
    for name, pkts in (("sample.pcap", sample()), ("smart_lock.pcap", smart_lock())):
        path = os.path.join(OUT, name)
        write_pcap(path, pkts)
        print(path)
        cross_check(path)
    with open(os.path.join(OUT, "sample_flows.jsonl"), "w") as f:
        f.write(flowlog())
    return 0


if __name__ == "__main__":
    sys.exit(main())
