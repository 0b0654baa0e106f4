import shutil
import sys

PURPLE = (228, 207, 228)
ORANGE = (233, 103, 54)
PEACH = (229, 124, 71)
GREEN = (173, 225, 204)
YELLOW = (232, 174, 115)

RST = "\033[0m"

LEVEL_COLORS = {
    "INFO": GREEN,
    "WARNING": YELLOW,
    "ERROR": ORANGE,
}


def whole_line():
    return " " * shutil.get_terminal_size().columns


def gradient_text(text, start_color=PURPLE, end_color=ORANGE, stream=sys.stdout):
    if not stream.isatty():
        return text

    result = ""
    length = len(text)
    for i, char in enumerate(text):
        ratio = i / max(length - 1, 1)
        r = int(start_color[0] + ratio * (end_color[0] - start_color[0]))
        g = int(start_color[1] + ratio * (end_color[1] - start_color[1]))
        b = int(start_color[2] + ratio * (end_color[2] - start_color[2]))
        result += f"\033[38;2;{r};{g};{b}m{char}"
    result += RST
    return result


def colored_text(text, foreground_color, background_color=None, stream=sys.stdout):
    if not stream.isatty():
        return str(text)

    r, g, b = foreground_color
    if background_color:
        bg_r, bg_g, bg_b = background_color
        return f"\033[38;2;{r};{g};{b}m\033[48;2;{bg_r};{bg_g};{bg_b}m{text}{RST}"
    return f"\033[38;2;{r};{g};{b}m{text}{RST}"


def colorize_verdict(passed):
    if passed is None:
        return f"[{colored_text('n/a', PEACH)}]"
    if passed:
        return f"[{colored_text('PASS', GREEN)}]"
    return f"[{colored_text('FAIL', ORANGE)}]"


def format_number(value):
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_number(v) for v in value) + "]"
    return str(value)


def log(source, message, level="INFO"):
    """Diagnostics go to stderr so stdout stays machine-readable"""
    prefix = colored_text(f"[{source}] [{level}]", LEVEL_COLORS.get(level, PURPLE), stream=sys.stderr)
    print(f"{prefix} {message}", file=sys.stderr)


def print_status_line(text):
    if not sys.stderr.isatty():
        return

    ERASE_LINE = "\033[K"

    terminal_width = shutil.get_terminal_size().columns

    output = f"{text}"

    if len(output) > terminal_width:
        output = output[:terminal_width - 4] + "..."

    print(f"\r{ERASE_LINE}{output}", end="", flush=True, file=sys.stderr)


def clear_status_line():
    if sys.stderr.isatty():
        print(f"\r{whole_line()}\r", end="", flush=True, file=sys.stderr)


def format_histogram(counts, edges, width=40):
    """One text bar per non-empty bin"""
    lines = []
    peak = max(counts) if len(counts) else 0
    for count, lo, hi in zip(counts, edges[:-1], edges[1:]):
        if not count:
            continue
        bar = "#" * max(1, round(width * count / peak))
        lines.append(f"  [{lo: .6f}, {hi: .6f})  {count:>7}  {bar}")
    return lines


def print_report_box(title, data_dict, output_stream=sys.stdout):
    if not data_dict:
        return

    terminal_width = shutil.get_terminal_size().columns
    max_key_len = max(len(str(key)) for key in data_dict.keys())

    max_content_width = max(7 + max_key_len + len(format_number(v)) for v in data_dict.values())
    if max_content_width > terminal_width:
        max_content_width = terminal_width

    header_text = f" {title} "
    total_width = max(len(header_text) + 4, max_content_width)

    print(gradient_text("\n" + header_text.center(total_width, "-"), stream=output_stream), file=output_stream)

    for key, value in data_dict.items():
        print(f"  {key:<{max_key_len}} : {format_number(value)}", file=output_stream)
