try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__


class Modality(StrEnum):
    """Iron-sensitive contrasts; SWI is only ever used as an unannotated prior."""

    IMAG = "imag"
    QSM = "qsm"
    R2S = "r2s"
    SWI = "swi"

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @classmethod
    def from_display_name(cls, name: str) -> "Modality":
        for modality, display_name in _DISPLAY_NAMES.items():
            if display_name.lower() == name.strip().lower():
                return modality
        return cls(name.strip().lower())


_DISPLAY_NAMES = {
    Modality.IMAG: "iMag",
    Modality.QSM: "QSM",
    Modality.R2S: "R2*",
    Modality.SWI: "SWI",
}

# Table ordering used by every report.
MODALITY_ORDER: tuple[Modality, ...] = (Modality.IMAG, Modality.QSM, Modality.R2S, Modality.SWI)


def combo_label(modalities: list[Modality] | tuple[Modality, ...]) -> str:
    ordered = sorted(set(modalities), key=MODALITY_ORDER.index)
    return "+".join(modality.display_name for modality in ordered)


def parse_combo_label(label: str) -> list[Modality]:
    return [Modality.from_display_name(part) for part in label.split("+") if part.strip()]
